#pragma once

#include <Eigen/Dense>

#include "polyspline/errors.hpp"

namespace polyspline {

struct DenseSolution {
  Eigen::MatrixXd x;
  /// max_col ||b - A x||_inf / (||A||_inf ||x||_inf + ||b||_inf)
  double relativeResidual = 0.0;
};

namespace detail {
inline double relativeResidual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& x,
                               const Eigen::MatrixXd& b) {
  const double normA = a.cwiseAbs().rowwise().sum().maxCoeff();
  double worst = 0.0;
  for (Eigen::Index c = 0; c < b.cols(); ++c) {
    const double res = (b.col(c) - a * x.col(c)).lpNorm<Eigen::Infinity>();
    const double scale = normA * x.col(c).lpNorm<Eigen::Infinity>() + b.col(c).lpNorm<Eigen::Infinity>();
    worst = std::max(worst, scale > 0.0 ? res / scale : res);
  }
  return worst;
}
}  // namespace detail

/// Dense LU with partial pivoting after column equilibration, followed by one
/// step of iterative refinement.  All right-hand sides share one factorization.
inline DenseSolution solveDense(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                double maxResidual = 1e-6) {
  const Eigen::Index n = a.rows();
  Eigen::VectorXd colScale(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double m = a.col(j).lpNorm<Eigen::Infinity>();
    colScale(j) = m > 0.0 ? 1.0 / m : 1.0;
  }
  const Eigen::MatrixXd scaled = a * colScale.asDiagonal();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(scaled);
  Eigen::MatrixXd y = lu.solve(b);
  y += lu.solve(b - scaled * y);
  DenseSolution out;
  out.x = colScale.asDiagonal() * y;
  out.relativeResidual = detail::relativeResidual(a, out.x, b);
  if (!out.x.allFinite() || !(out.relativeResidual <= maxResidual))
    throw ConstructionError("linear system is singular or too ill-conditioned (relative residual " +
                                std::to_string(out.relativeResidual) + ")",
                            out.relativeResidual);
  return out;
}

}  // namespace polyspline
