#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "hdgc/panel.hpp"

namespace hdgc {

/// Coefficients of a VAR(p): y_t = A_1 y_{t-1} + ... + A_p y_{t-p} + eps_t.
struct VarCoefficients {
  std::vector<Eigen::MatrixXd> lags;  ///< A_1..A_p, each K x K

  int dimension() const { return lags.empty() ? 0 : int(lags.front().rows()); }
  int order() const { return int(lags.size()); }
};

enum class Hypothesis { Null, Alternative };

/// The three simulation designs (all VAR(1)).
///
///   1: A = diag(0.5); under the alternative A(2,1) = 0.2 so series 1
///      Granger-causes series 2.
///   2: A(i,j) = (-1)^{|i-j|} 0.4^{|i-j|+1}; under the null A(2,1) is zeroed.
///   3: block diagonal, 5x5 blocks filled with 0.15 (k divisible by 5);
///      under the null A(2,1) is zeroed.
///
/// Indices in the description are 1-based rows/cols of A.
VarCoefficients build_dgp(int dgp, int k, Hypothesis hyp);

/// Innovation distribution: zero-mean Gaussian with covariance sigma.
struct InnovationSpec {
  Eigen::MatrixXd sigma;  ///< K x K, symmetric positive definite
};

/// Toeplitz covariance sigma_ij = rho^{|i-j|}. Requires 0 <= rho < 1.
InnovationSpec toeplitz_sigma(int k, double rho);

struct StabilityReport {
  bool stable = false;
  double spectral_radius = 0.0;  ///< of the companion matrix
};

/// Companion-matrix stability check; stable iff spectral radius < 1.
StabilityReport stability_check(const VarCoefficients& coeffs);

inline constexpr int kDefaultBurnIn = 50;

/// Simulates t observations after discarding burn_in initial steps, starting
/// from zeros. Innovations are Gaussian via Cholesky of sigma; normal draws
/// use mt19937_64 + inverse-CDF so output is bit-reproducible across
/// platforms. Throws if the VAR is unstable or sigma is not SPD.
TimeSeriesPanel simulate_var(const VarCoefficients& coeffs,
                             const InnovationSpec& innovations, long t,
                             int burn_in, std::uint64_t seed);

/// Standard normal sampler used by simulate_var (exposed for reuse and
/// documentation of the portability contract).
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : eng_(seed) {}
  double operator()();

 private:
  std::mt19937_64 eng_;
};

}  // namespace hdgc
