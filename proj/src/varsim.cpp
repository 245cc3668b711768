#include "hdgc/varsim.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "hdgc/stats.hpp"

namespace hdgc {

VarCoefficients build_dgp(int dgp, int k, Hypothesis hyp) {
  if (k < 2) throw std::invalid_argument("build_dgp: k must be >= 2");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
  switch (dgp) {
    case 1: {
      a.diagonal().setConstant(0.5);
      if (hyp == Hypothesis::Alternative) a(1, 0) = 0.2;
      break;
    }
    case 2: {
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          const int d = std::abs(i - j);
          const double sign = (d % 2 == 0) ? 1.0 : -1.0;
          a(i, j) = sign * std::pow(0.4, d + 1);
        }
      if (hyp == Hypothesis::Null) a(1, 0) = 0.0;
      break;
    }
    case 3: {
      if (k % 5 != 0)
        throw std::invalid_argument("build_dgp: dgp 3 needs k divisible by 5");
      for (int b = 0; b < k / 5; ++b)
        a.block(b * 5, b * 5, 5, 5).setConstant(0.15);
      if (hyp == Hypothesis::Null) a(1, 0) = 0.0;
      break;
    }
    default:
      throw std::invalid_argument("build_dgp: dgp must be 1, 2 or 3");
  }
  return VarCoefficients{{a}};
}

InnovationSpec toeplitz_sigma(int k, double rho) {
  if (k < 1) throw std::invalid_argument("toeplitz_sigma: k must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0))
    throw std::invalid_argument("toeplitz_sigma: rho must be in [0, 1)");
  Eigen::MatrixXd sigma(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) sigma(i, j) = std::pow(rho, std::abs(i - j));
  return InnovationSpec{sigma};
}

StabilityReport stability_check(const VarCoefficients& coeffs) {
  const int k = coeffs.dimension();
  const int p = coeffs.order();
  if (k == 0 || p == 0)
    throw std::invalid_argument("stability_check: empty coefficients");
  for (const auto& a : coeffs.lags)
    if (a.rows() != k || a.cols() != k)
      throw std::invalid_argument("stability_check: ragged lag matrices");

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(k * p, k * p);
  for (int j = 0; j < p; ++j)
    companion.block(0, j * k, k, k) = coeffs.lags[size_t(j)];
  if (p > 1)
    companion.block(k, 0, k * (p - 1), k * (p - 1)).setIdentity();

  const Eigen::VectorXcd eigs =
      Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues();
  const double radius = eigs.cwiseAbs().maxCoeff();
  return StabilityReport{radius < 1.0, radius};
}

double NormalSampler::operator()() {
  // (u >> 11) is uniform on [0, 2^53); the offset keeps the argument strictly
  // inside (0, 1). Inverse-CDF rather than Box-Muller so the stream depends
  // only on mt19937_64, which the standard pins down bit for bit.
  const std::uint64_t u = eng_();
  const double v = (double(u >> 11) + 0.5) * 0x1p-53;
  return stats::norm_quantile(v);
}

TimeSeriesPanel simulate_var(const VarCoefficients& coeffs,
                             const InnovationSpec& innovations, long t,
                             int burn_in, std::uint64_t seed) {
  const int k = coeffs.dimension();
  const int p = coeffs.order();
  if (t < 1) throw std::invalid_argument("simulate_var: t must be >= 1");
  if (burn_in < 0)
    throw std::invalid_argument("simulate_var: burn_in must be >= 0");
  if (innovations.sigma.rows() != k || innovations.sigma.cols() != k)
    throw std::invalid_argument("simulate_var: sigma dimension mismatch");

  const auto stability = stability_check(coeffs);
  if (!stability.stable)
    throw std::runtime_error(
        "simulate_var: unstable VAR (spectral radius " +
        std::to_string(stability.spectral_radius) + ")");

  Eigen::LLT<Eigen::MatrixXd> llt(innovations.sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("simulate_var: sigma is not positive definite");
  const Eigen::MatrixXd chol = llt.matrixL();

  NormalSampler normal(seed);
  // History ring: history[j] = y_{t-1-j}.
  std::vector<Eigen::VectorXd> history(size_t(p), Eigen::VectorXd::Zero(k));
  Eigen::VectorXd z(k), y(k);

  TimeSeriesPanel panel;
  panel.data.resize(t, k);
  panel.names = default_series_names(k);

  const long total = long(burn_in) + t;
  for (long step = 0; step < total; ++step) {
    for (int i = 0; i < k; ++i) z(i) = normal();
    y = chol * z;
    for (int j = 0; j < p; ++j)
      y.noalias() += coeffs.lags[size_t(j)] * history[size_t(j)];
    for (int j = p - 1; j > 0; --j) history[size_t(j)] = history[size_t(j - 1)];
    if (p > 0) history[0] = y;
    if (step >= burn_in) panel.data.row(step - burn_in) = y.transpose();
  }
  return panel;
}

}  // namespace hdgc
