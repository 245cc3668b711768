#pragma once

namespace hdgc::stats {

/// Upper tail probability P(X > x) for X ~ chi-squared(dof). dof > 0.
double chi2_sf(double x, double dof);

/// Upper tail probability P(X > x) for X ~ F(d1, d2). d1, d2 > 0.
double f_sf(double x, double d1, double d2);

/// Standard normal quantile Phi^{-1}(p), p in (0, 1).
double norm_quantile(double p);

/// Standard normal CDF Phi(x).
double norm_cdf(double x);

}  // namespace hdgc::stats
