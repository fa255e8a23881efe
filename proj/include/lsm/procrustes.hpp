#pragma once

#include <Eigen/Dense>

namespace lsm {

/// Best translation + rotation/reflection of `moving` onto `target`
/// (least squares). No scaling, so pairwise distances are preserved.
Eigen::MatrixXd procrustes_align(const Eigen::MatrixXd& moving, const Eigen::MatrixXd& target);

}  // namespace lsm
