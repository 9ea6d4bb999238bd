#pragma once

#include <Eigen/Dense>

namespace hiresim {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VecXd = Vec<double>;
using MatXd = Mat<double>;

// One-stage: hires come straight off the estimated ranking.
// Two-stage: a finalist slate is drawn first, then the hire uses the
// interview signal on top of the estimate.
enum class StageMode { OneStage, TwoStage };

enum class RadiusVariant { DetBased, LBased, Bayes };

}  // namespace hiresim
