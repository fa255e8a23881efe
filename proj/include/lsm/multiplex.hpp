#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lsm {

/// A collection of K binary networks ("views") on a shared node set.
///
/// Entries are stored view-major as K blocks of n*n bytes. The mask h marks
/// observed cells (1) and missing cells (0). Diagonal cells are never read.
/// Edge covariates, when present, are shared by every view.
class Multiplex {
public:
  Multiplex() = default;
  Multiplex(int n, int K, bool directed);

  int n() const { return n_; }
  int K() const { return K_; }
  int F() const { return static_cast<int>(covariates_.size()); }
  bool directed() const { return directed_; }

  std::uint8_t y(int k, int i, int j) const { return y_[index(k, i, j)]; }
  std::uint8_t h(int k, int i, int j) const { return h_[index(k, i, j)]; }
  double x(int f, int i, int j) const { return covariates_[f](i, j); }

  /// Sets one cell; for undirected multiplexes the mirror cell is set too.
  void set(int k, int i, int j, std::uint8_t value, std::uint8_t observed = 1);

  const std::vector<Eigen::MatrixXd>& covariates() const { return covariates_; }
  void set_covariates(std::vector<Eigen::MatrixXd> covariates);

  std::vector<std::string> node_labels;
  std::vector<std::string> view_labels;

  /// Throws DataError when an invariant is broken.
  void validate() const;

  /// Fraction of observed off-diagonal cells equal to 1 in view k.
  double density(int k) const;

private:
  std::size_t index(int k, int i, int j) const {
    return (static_cast<std::size_t>(k) * n_ + i) * n_ + j;
  }

  int n_ = 0;
  int K_ = 0;
  bool directed_ = true;
  std::vector<std::uint8_t> y_;
  std::vector<std::uint8_t> h_;
  std::vector<Eigen::MatrixXd> covariates_;
};

enum class FileFormat { AdjacencyCsv, EdgelistCsv };

FileFormat parse_file_format(const std::string& name);

struct LoadOptions {
  FileFormat format = FileFormat::EdgelistCsv;
  bool directed = true;
  /// Declared node set. When absent, labels are collected in order of first
  /// appearance; when present, any other label in the file is an error.
  std::optional<std::vector<std::string>> node_labels;
};

Multiplex load_multiplex(const std::string& path, const LoadOptions& options = {});

/// Reads rows (from, to, f1, ..., fF) into m. Unlisted dyads get covariate 0.
void load_covariates(Multiplex& m, const std::string& path);

/// Writes every off-diagonal cell as (view, from, to, value); missing cells as NA.
void write_edgelist_csv(const Multiplex& m, const std::string& path);

/// Writes stacked n*n blocks with a leading view-id column.
void write_adjacency_csv(const Multiplex& m, const std::string& path);

std::vector<std::string> read_node_labels(const std::string& path);

struct DegreeMatrices {
  Eigen::MatrixXd out;  ///< n x K, s[i][k]
  Eigen::MatrixXd in;   ///< n x K, r[i][k]
};

/// Mask-weighted out- and in-degrees per view.
DegreeMatrices degrees(const Multiplex& m);

/// Share of concordant off-diagonal cells among cells observed in both views.
double association(const Multiplex& m, int k, int l);

}  // namespace lsm
