#include "lsm/multiplex.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <map>
#include <unordered_map>

#include "csv.hpp"
#include "lsm/error.hpp"

namespace lsm {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

enum class Cell { Zero, One, Missing };

Cell parse_cell(const std::string& field, const std::string& where) {
  if (lower(field) == "na") return Cell::Missing;
  double v = 0.0;
  if (detail::parse_double(field, v)) {
    if (v == 0.0) return Cell::Zero;
    if (v == 1.0) return Cell::One;
  }
  throw DataError("non-binary value '" + field + "' at " + where);
}

std::string location(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line + 1);
}

class LabelIndex {
public:
  explicit LabelIndex(const std::optional<std::vector<std::string>>& declared) {
    if (declared) {
      fixed_ = true;
      for (const auto& l : *declared) add(l);
      if (labels_.size() != declared->size()) throw DataError("duplicate node label in node list");
    }
  }
  int get(const std::string& label, const std::string& where) {
    auto it = index_.find(label);
    if (it != index_.end()) return it->second;
    if (fixed_) throw DataError("unknown node label '" + label + "' at " + where);
    return add(label);
  }
  const std::vector<std::string>& labels() const { return labels_; }

private:
  int add(const std::string& label) {
    auto [it, inserted] = index_.emplace(label, static_cast<int>(labels_.size()));
    if (inserted) labels_.push_back(label);
    return it->second;
  }
  bool fixed_ = false;
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> labels_;
};

struct RawCell {
  int view;
  int from;
  int to;
  Cell value;
  std::size_t line;
};

Multiplex load_edgelist(const std::string& path, const std::vector<std::string>& lines,
                        const LoadOptions& options) {
  LabelIndex nodes(options.node_labels);
  std::vector<std::string> views;
  std::map<std::string, int> view_index;
  std::vector<RawCell> cells;

  std::size_t start = 0;
  if (lower(detail::split_csv_line(lines[0]).front()) == "view") start = 1;
  for (std::size_t l = start; l < lines.size(); ++l) {
    const auto fields = detail::split_csv_line(lines[l]);
    const auto where = location(path, l);
    if (fields.size() != 4) throw DataError("expected 4 columns (view,from,to,value) at " + where);
    auto [vit, inserted] = view_index.emplace(fields[0], static_cast<int>(views.size()));
    if (inserted) views.push_back(fields[0]);
    const int from = nodes.get(fields[1], where);
    const int to = nodes.get(fields[2], where);
    if (from == to) throw DataError("self-loop '" + fields[1] + "' at " + where);
    cells.push_back({vit->second, from, to, parse_cell(fields[3], where), l});
  }
  if (views.empty()) throw DataError("empty file: " + path);

  const int n = static_cast<int>(nodes.labels().size());
  if (n < 2) throw DataError("multiplex needs at least 2 nodes: " + path);
  Multiplex m(n, static_cast<int>(views.size()), options.directed);
  m.node_labels = nodes.labels();
  m.view_labels = views;

  // 0 unset, 1 set to zero, 2 set to one, 3 set missing
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(m.K()) * n * n, 0);
  auto mark = [&](int k, int i, int j) -> std::uint8_t& {
    return seen[(static_cast<std::size_t>(k) * n + i) * n + j];
  };
  for (const auto& c : cells) {
    const std::uint8_t code = c.value == Cell::Zero ? 1 : c.value == Cell::One ? 2 : 3;
    for (int pass = 0; pass < (options.directed ? 1 : 2); ++pass) {
      const int i = pass == 0 ? c.from : c.to;
      const int j = pass == 0 ? c.to : c.from;
      auto& s = mark(c.view, i, j);
      if (s != 0 && s != code) {
        throw DataError(std::string(options.directed ? "conflicting duplicate dyad"
                                                     : "asymmetric entry in undirected multiplex") +
                        " at " + location(path, c.line));
      }
      s = code;
    }
    m.set(c.view, c.from, c.to, c.value == Cell::One ? 1 : 0, c.value == Cell::Missing ? 0 : 1);
  }
  m.validate();
  return m;
}

Multiplex load_adjacency(const std::string& path, const std::vector<std::string>& lines,
                         const LoadOptions& options) {
  std::size_t start = 0;
  std::vector<std::string> header_labels;
  {
    const auto first = detail::split_csv_line(lines[0]);
    if (lower(first.front()) == "view") {
      header_labels.assign(first.begin() + 1, first.end());
      start = 1;
    }
  }
  if (start >= lines.size()) throw DataError("empty file: " + path);

  const std::size_t width = detail::split_csv_line(lines[start]).size();
  if (width < 3) throw DataError("adjacency rows need a view id and at least 2 entries: " + path);
  const int n = static_cast<int>(width - 1);

  std::vector<std::string> views;
  std::vector<std::vector<std::vector<Cell>>> blocks;
  for (std::size_t l = start; l < lines.size(); ++l) {
    const auto fields = detail::split_csv_line(lines[l]);
    const auto where = location(path, l);
    if (fields.size() != width) throw DataError("ragged matrix at " + where);
    if (views.empty() || views.back() != fields[0] ||
        static_cast<int>(blocks.back().size()) == n) {
      if (!views.empty() && static_cast<int>(blocks.back().size()) != n) {
        throw DataError("ragged matrix: view '" + views.back() + "' has " +
                        std::to_string(blocks.back().size()) + " rows, expected " +
                        std::to_string(n));
      }
      views.push_back(fields[0]);
      blocks.emplace_back();
    }
    std::vector<Cell> row;
    row.reserve(n);
    for (int j = 0; j < n; ++j) row.push_back(parse_cell(fields[j + 1], where));
    const int i = static_cast<int>(blocks.back().size());
    if (row[i] == Cell::One) throw DataError("self-loop on the diagonal at " + where);
    blocks.back().push_back(std::move(row));
  }
  if (static_cast<int>(blocks.back().size()) != n) {
    throw DataError("ragged matrix: view '" + views.back() + "' has " +
                    std::to_string(blocks.back().size()) + " rows, expected " + std::to_string(n));
  }

  Multiplex m(n, static_cast<int>(views.size()), options.directed);
  if (options.node_labels) {
    if (static_cast<int>(options.node_labels->size()) != n) {
      throw DataError("node list has " + std::to_string(options.node_labels->size()) +
                      " labels but the matrices are " + std::to_string(n) + " wide");
    }
    m.node_labels = *options.node_labels;
  } else if (!header_labels.empty()) {
    m.node_labels = header_labels;
  }
  m.view_labels = views;
  for (int k = 0; k < m.K(); ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const Cell c = blocks[k][i][j];
        if (!options.directed && c != blocks[k][j][i]) {
          throw DataError("asymmetric entry in undirected multiplex: view '" + views[k] + "' (" +
                          std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
        }
        m.set(k, i, j, c == Cell::One ? 1 : 0, c == Cell::Missing ? 0 : 1);
      }
    }
  }
  m.validate();
  return m;
}

std::string format_cell(const Multiplex& m, int k, int i, int j) {
  if (!m.h(k, i, j)) return "NA";
  return m.y(k, i, j) ? "1" : "0";
}

}  // namespace

Multiplex::Multiplex(int n, int K, bool directed) : n_(n), K_(K), directed_(directed) {
  if (n < 2) throw DataError("multiplex needs n >= 2");
  if (K < 1) throw DataError("multiplex needs K >= 1");
  const std::size_t size = static_cast<std::size_t>(K) * n * n;
  y_.assign(size, 0);
  h_.assign(size, 1);
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < n; ++i) h_[index(k, i, i)] = 0;
  }
  for (int i = 0; i < n; ++i) node_labels.push_back(std::to_string(i + 1));
  for (int k = 0; k < K; ++k) view_labels.push_back(std::to_string(k + 1));
}

void Multiplex::set(int k, int i, int j, std::uint8_t value, std::uint8_t observed) {
  y_[index(k, i, j)] = value;
  h_[index(k, i, j)] = observed;
  if (!directed_) {
    y_[index(k, j, i)] = value;
    h_[index(k, j, i)] = observed;
  }
}

void Multiplex::set_covariates(std::vector<Eigen::MatrixXd> covariates) {
  for (const auto& x : covariates) {
    if (x.rows() != n_ || x.cols() != n_) throw DataError("covariate matrix must be n x n");
    if (!x.allFinite()) throw DataError("covariate values must be finite");
  }
  covariates_ = std::move(covariates);
}

void Multiplex::validate() const {
  if (static_cast<int>(node_labels.size()) != n_) throw DataError("node label count != n");
  if (static_cast<int>(view_labels.size()) != K_) throw DataError("view label count != K");
  for (int k = 0; k < K_; ++k) {
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        if (i == j) continue;
        if (y(k, i, j) > 1 || h(k, i, j) > 1) throw DataError("non-binary value in storage");
        if (!directed_ && (y(k, i, j) != y(k, j, i) || h(k, i, j) != h(k, j, i))) {
          throw DataError("asymmetric entry in undirected multiplex");
        }
      }
    }
  }
}

double Multiplex::density(int k) const {
  long edges = 0;
  long observed = 0;
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      if (i == j || !h(k, i, j)) continue;
      ++observed;
      edges += y(k, i, j);
    }
  }
  return observed == 0 ? 0.0 : static_cast<double>(edges) / observed;
}

FileFormat parse_file_format(const std::string& name) {
  const auto l = lower(name);
  if (l == "adjacency-csv" || l == "adjacency") return FileFormat::AdjacencyCsv;
  if (l == "edgelist-csv" || l == "edgelist") return FileFormat::EdgelistCsv;
  throw std::invalid_argument("unknown file format: " + name);
}

Multiplex load_multiplex(const std::string& path, const LoadOptions& options) {
  const auto lines = detail::read_lines(path);
  if (lines.empty()) throw DataError("empty file: " + path);
  return options.format == FileFormat::EdgelistCsv ? load_edgelist(path, lines, options)
                                                   : load_adjacency(path, lines, options);
}

void load_covariates(Multiplex& m, const std::string& path) {
  const auto lines = detail::read_lines(path);
  if (lines.empty()) throw DataError("empty file: " + path);
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < m.n(); ++i) index.emplace(m.node_labels[i], i);

  std::size_t start = 0;
  {
    const auto first = detail::split_csv_line(lines[0]);
    double v = 0.0;
    if (first.size() >= 3 && !detail::parse_double(first[2], v)) start = 1;
  }
  if (start >= lines.size()) throw DataError("empty file: " + path);
  const std::size_t width = detail::split_csv_line(lines[start]).size();
  if (width < 3) throw DataError("covariate rows need (from, to, f1, ...): " + path);
  const int F = static_cast<int>(width - 2);
  std::vector<Eigen::MatrixXd> x(F, Eigen::MatrixXd::Zero(m.n(), m.n()));
  for (std::size_t l = start; l < lines.size(); ++l) {
    const auto fields = detail::split_csv_line(lines[l]);
    const auto where = location(path, l);
    if (fields.size() != width) throw DataError("ragged covariate row at " + where);
    auto fi = index.find(fields[0]);
    auto ti = index.find(fields[1]);
    if (fi == index.end()) throw DataError("unknown node label '" + fields[0] + "' at " + where);
    if (ti == index.end()) throw DataError("unknown node label '" + fields[1] + "' at " + where);
    if (fi->second == ti->second) throw DataError("self-loop covariate at " + where);
    for (int f = 0; f < F; ++f) {
      double v = 0.0;
      if (!detail::parse_double(fields[f + 2], v)) {
        throw DataError("non-numeric covariate '" + fields[f + 2] + "' at " + where);
      }
      x[f](fi->second, ti->second) = v;
      if (!m.directed()) x[f](ti->second, fi->second) = v;
    }
  }
  m.set_covariates(std::move(x));
}

void write_edgelist_csv(const Multiplex& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  out << "view,from,to,value\n";
  for (int k = 0; k < m.K(); ++k) {
    for (int i = 0; i < m.n(); ++i) {
      for (int j = m.directed() ? 0 : i + 1; j < m.n(); ++j) {
        if (i == j) continue;
        out << m.view_labels[k] << ',' << m.node_labels[i] << ',' << m.node_labels[j] << ','
            << format_cell(m, k, i, j) << '\n';
      }
    }
  }
}

void write_adjacency_csv(const Multiplex& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  out << "view";
  for (const auto& l : m.node_labels) out << ',' << l;
  out << '\n';
  for (int k = 0; k < m.K(); ++k) {
    for (int i = 0; i < m.n(); ++i) {
      out << m.view_labels[k];
      for (int j = 0; j < m.n(); ++j) out << ',' << (i == j ? "0" : format_cell(m, k, i, j));
      out << '\n';
    }
  }
}

std::vector<std::string> read_node_labels(const std::string& path) {
  std::vector<std::string> labels;
  for (const auto& line : detail::read_lines(path)) labels.push_back(detail::split_csv_line(line)[0]);
  if (labels.empty()) throw DataError("empty file: " + path);
  return labels;
}

DegreeMatrices degrees(const Multiplex& m) {
  DegreeMatrices d{Eigen::MatrixXd::Zero(m.n(), m.K()), Eigen::MatrixXd::Zero(m.n(), m.K())};
  for (int k = 0; k < m.K(); ++k) {
    for (int i = 0; i < m.n(); ++i) {
      for (int j = 0; j < m.n(); ++j) {
        if (i == j || !m.h(k, i, j) || !m.y(k, i, j)) continue;
        d.out(i, k) += 1.0;
        d.in(j, k) += 1.0;
      }
    }
  }
  return d;
}

double association(const Multiplex& m, int k, int l) {
  if (k < 0 || k >= m.K() || l < 0 || l >= m.K()) throw std::out_of_range("view index out of range");
  long concordant = 0;
  long discordant = 0;
  for (int i = 0; i < m.n(); ++i) {
    for (int j = 0; j < m.n(); ++j) {
      if (i == j || !m.h(k, i, j) || !m.h(l, i, j)) continue;
      if (m.y(k, i, j) == m.y(l, i, j)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  if (concordant + discordant == 0) throw DataError("no comparable cells between the two views");
  return static_cast<double>(concordant) / static_cast<double>(concordant + discordant);
}

}  // namespace lsm
