#pragma once

#include <cmath>
#include <stdexcept>
#include <type_traits>

#include "hiresim/types.hpp"

namespace hiresim {

// Ridge posterior for one group: V_bar = lambda I + sum x x',  b = sum x y,
// theta_hat = V_bar^{-1} b.  The inverse and log det are maintained
// incrementally (rank-1 updates) and re-factorized periodically to keep
// round-off from accumulating.
template <typename Scalar>
struct GroupPosteriorT {
  Mat<Scalar> v_bar;
  Mat<Scalar> v_inv;
  Vec<Scalar> b;
  Vec<Scalar> theta_hat;
  Scalar log_det = 0;
  Scalar lambda = 0;
  Scalar max_x_norm = 0;  // running max ||x|| over observed candidates
  long n_obs = 0;
  int updates_since_refresh = 0;
};

using GroupPosterior = GroupPosteriorT<double>;

inline constexpr int kPosteriorRefreshInterval = 256;

template <typename Scalar>
GroupPosteriorT<Scalar> posterior_init(int d, Scalar lambda) {
  if (d < 1) throw std::invalid_argument("posterior dimension must be >= 1");
  if (!(lambda > 0)) throw std::invalid_argument("ridge lambda must be > 0");
  GroupPosteriorT<Scalar> p;
  p.v_bar = lambda * Mat<Scalar>::Identity(d, d);
  p.v_inv = (Scalar(1) / lambda) * Mat<Scalar>::Identity(d, d);
  p.b = Vec<Scalar>::Zero(d);
  p.theta_hat = Vec<Scalar>::Zero(d);
  p.log_det = Scalar(d) * std::log(lambda);
  p.lambda = lambda;
  return p;
}

// Full re-factorization of v_inv / log_det from v_bar.
template <typename Scalar>
void posterior_refresh(GroupPosteriorT<Scalar>& p) {
  const Eigen::LLT<Mat<Scalar>> llt(p.v_bar);
  if (llt.info() != Eigen::Success)
    throw std::logic_error("posterior covariance lost positive definiteness");
  const int d = int(p.v_bar.rows());
  p.v_inv = llt.solve(Mat<Scalar>::Identity(d, d));
  p.log_det = Scalar(2) * llt.matrixLLT().diagonal().array().log().sum();
  p.updates_since_refresh = 0;
}

// The x-taking functions accept any Eigen vector expression; a plain
// Vec<Scalar> binds without a copy.
template <typename Scalar, typename Derived>
void posterior_update(GroupPosteriorT<Scalar>& p, const Eigen::MatrixBase<Derived>& x,
                      std::type_identity_t<Scalar> y) {
  const Eigen::Ref<const Vec<Scalar>> xr(x.derived());
  const Vec<Scalar> vx = p.v_inv * xr;
  const Scalar quad = xr.dot(vx);
  p.v_bar.noalias() += xr * xr.transpose();
  p.b.noalias() += xr * y;
  p.log_det += std::log(Scalar(1) + quad);
  p.v_inv.noalias() -= vx * vx.transpose() / (Scalar(1) + quad);
  p.max_x_norm = std::max(p.max_x_norm, Scalar(xr.norm()));
  ++p.n_obs;
  if (++p.updates_since_refresh >= kPosteriorRefreshInterval) posterior_refresh(p);
  p.theta_hat.noalias() = p.v_inv * p.b;
}

template <typename Scalar, typename Derived>
Scalar predict(const GroupPosteriorT<Scalar>& p, const Eigen::MatrixBase<Derived>& x) {
  return p.theta_hat.dot(x.derived());
}

// ||x||_{V_bar^{-1}}: the direction-dependent part of the confidence width.
template <typename Scalar, typename Derived>
Scalar weighted_norm(const GroupPosteriorT<Scalar>& p,
                     const Eigen::MatrixBase<Derived>& x) {
  const Eigen::Ref<const Vec<Scalar>> xr(x.derived());
  return std::sqrt(std::max(Scalar(0), Scalar(xr.dot(p.v_inv * xr))));
}

// ||v||_{V_bar}: used to test whether theta lies inside the ellipsoid.
template <typename Scalar, typename Derived>
Scalar vbar_norm(const GroupPosteriorT<Scalar>& p, const Eigen::MatrixBase<Derived>& v) {
  const Eigen::Ref<const Vec<Scalar>> vr(v.derived());
  return std::sqrt(std::max(Scalar(0), Scalar(vr.dot(p.v_bar * vr))));
}

template <typename Scalar>
struct RadiusParamsT {
  Scalar sigma_eps = 1;
  Scalar lambda = 1;
  Scalar delta = Scalar(0.1);
  Scalar s_bound = 1;              // bound on ||theta||
  RadiusVariant variant = RadiusVariant::DetBased;
  long horizon = 0;                // rounds N; only the Bayes variant needs it
};

using RadiusParams = RadiusParamsT<double>;

// Self-normalized confidence radius beta such that
// ||theta_hat - theta||_{V_bar} <= beta holds w.p. >= 1 - delta uniformly
// over updates.  DetBased uses the realized det(V_bar); LBased bounds it via
// the largest observed ||x||; Bayes is a horizon-dependent constant.
template <typename Scalar>
Scalar conf_radius(const GroupPosteriorT<Scalar>& p, const RadiusParamsT<Scalar>& rp) {
  if (!(rp.delta > 0 && rp.delta < 1))
    throw std::logic_error("conf_radius: delta outside (0,1)");
  if (!(rp.lambda > 0)) throw std::logic_error("conf_radius: lambda must be > 0");
  const Scalar d = Scalar(p.v_bar.rows());
  switch (rp.variant) {
    case RadiusVariant::DetBased: {
      const Scalar half_log_ratio =
          (p.log_det - d * std::log(rp.lambda)) / Scalar(2);
      return rp.sigma_eps * std::sqrt(d * (half_log_ratio - std::log(rp.delta))) +
             std::sqrt(rp.lambda) * rp.s_bound;
    }
    case RadiusVariant::LBased: {
      const Scalar l2 = p.max_x_norm * p.max_x_norm;
      const Scalar inner = (Scalar(1) + Scalar(p.n_obs) * l2 / rp.lambda) / rp.delta;
      return rp.sigma_eps * std::sqrt(d * std::log(inner)) +
             std::sqrt(rp.lambda) * rp.s_bound;
    }
    case RadiusVariant::Bayes: {
      if (rp.horizon < 1)
        throw std::logic_error("conf_radius: Bayes variant needs the horizon");
      const Scalar n = Scalar(rp.horizon);
      const Scalar t =
          std::log(Scalar(M_PI) * Scalar(M_PI) * n * n / (Scalar(6) * rp.delta));
      return rp.sigma_eps * std::sqrt(d + t + Scalar(2) * std::sqrt(d * t));
    }
  }
  throw std::logic_error("conf_radius: unknown variant");
}

template <typename Scalar, typename Derived>
Scalar ucb_index(const GroupPosteriorT<Scalar>& p, const Eigen::MatrixBase<Derived>& x,
                 std::type_identity_t<Scalar> radius) {
  return predict(p, x) + radius * weighted_norm(p, x);
}

template <typename Scalar, typename Derived>
Scalar ucb_index(const GroupPosteriorT<Scalar>& p, const Eigen::MatrixBase<Derived>& x,
                 const RadiusParamsT<Scalar>& rp) {
  return ucb_index(p, x, conf_radius(p, rp));
}

template <typename Scalar>
Scalar min_eigenvalue(const GroupPosteriorT<Scalar>& p) {
  if (p.v_bar.rows() == 1) return p.v_bar(0, 0);
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(p.v_bar, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace hiresim
