#include "hdgc/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <stdexcept>

namespace hdgc::stats {

double chi2_sf(double x, double dof) {
  if (!(dof > 0)) throw std::invalid_argument("chi2_sf: dof must be > 0");
  if (std::isnan(x)) throw std::invalid_argument("chi2_sf: x is NaN");
  if (x <= 0) return 1.0;
  if (std::isinf(x)) return 0.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, x));
}

double f_sf(double x, double d1, double d2) {
  if (!(d1 > 0) || !(d2 > 0))
    throw std::invalid_argument("f_sf: dof must be > 0");
  if (std::isnan(x)) throw std::invalid_argument("f_sf: x is NaN");
  if (x <= 0) return 1.0;
  if (std::isinf(x)) return 0.0;
  boost::math::fisher_f dist(d1, d2);
  return boost::math::cdf(boost::math::complement(dist, x));
}

double norm_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("norm_quantile: p must be in (0, 1)");
  boost::math::normal dist;
  return boost::math::quantile(dist, p);
}

double norm_cdf(double x) {
  boost::math::normal dist;
  return boost::math::cdf(dist, x);
}

}  // namespace hdgc::stats
