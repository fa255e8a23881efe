#include "lsm/procrustes.hpp"

#include <stdexcept>

namespace lsm {

Eigen::MatrixXd procrustes_align(const Eigen::MatrixXd& moving, const Eigen::MatrixXd& target) {
  if (moving.rows() != target.rows() || moving.cols() != target.cols()) {
    throw std::invalid_argument("procrustes_align: configurations differ in shape");
  }
  const Eigen::RowVectorXd mc = moving.colwise().mean();
  const Eigen::RowVectorXd tc = target.colwise().mean();
  const Eigen::MatrixXd a = moving.rowwise() - mc;
  const Eigen::MatrixXd b = target.rowwise() - tc;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.transpose() * b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXd rotation = svd.matrixU() * svd.matrixV().transpose();
  return (a * rotation).rowwise() + tc;
}

}  // namespace lsm
