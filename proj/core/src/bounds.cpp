#include "bbtpolar/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace bbtpolar {

double q_func(double x) { return 0.5 * std::erfc(x / 1.4142135623730950488); }

double e0_tail(double p, int n_t, int n_l, int n_u) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("p out of [0,1]");
  int lo = std::max(n_l, 0);
  int hi = std::min(n_u, n_t);
  if (n_t < 0 || lo > hi) return 0.0;
  if (p == 0.0) return lo == 0 ? 1.0 : 0.0;
  if (p == 1.0) return hi == n_t ? 1.0 : 0.0;
  double lp = std::log(p), lq = std::log1p(-p);
  // Log-domain terms with a running max shift.
  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(hi - lo) + 1);
  double lmax = -std::numeric_limits<double>::infinity();
  for (int m = lo; m <= hi; ++m) {
    double lt = std::lgamma(n_t + 1.0) - std::lgamma(m + 1.0) -
                std::lgamma(n_t - m + 1.0) + m * lp + (n_t - m) * lq;
    logs.push_back(lt);
    lmax = std::max(lmax, lt);
  }
  double s = 0.0;
  for (double lt : logs) s += std::exp(lt - lmax);
  double v = std::exp(lmax) * s;
  return std::min(v, 1.0);
}

namespace {

// floor(w_star - w/2) as an integer.
int shell_limit(int w_star, int w) { return w_star - (w + 1) / 2; }

}  // namespace

double fer_upper_bound_objective(const Wef& wef, NoiseModel noise, int w_star) {
  const int n = wef.length;
  const double sigma = noise.sigma;
  if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
  const double pb = q_func(1.0 / sigma);
  double sum = 0.0;
  for (int w = 1; w <= std::min(2 * w_star, n); ++w) {
    double aw = wef.coef[static_cast<std::size_t>(w)];
    if (aw <= 0.0) continue;
    double qw = q_func(std::sqrt(static_cast<double>(w)) / sigma);
    int lim = shell_limit(w_star, w);
    double e1 = aw * qw * e0_tail(pb, n - w, 0, lim);
    double e2 = (aw - 1.0) * (qw - 0.5 * qw * qw) * e0_tail(pb, n - 2 * w, 0, lim) + qw;
    sum += std::min(e1, e2);
  }
  sum += e0_tail(pb, n, w_star + 1, n);
  return std::min(sum, 1.0);
}

BoundResult fer_upper_bound(const Wef& wef, NoiseModel noise) {
  const int n = wef.length;
  if (n < 1) throw std::invalid_argument("WEF length must be >= 1");
  BoundResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (int w_star = 0; w_star <= n; ++w_star) {
    double v = fer_upper_bound_objective(wef, noise, w_star);
    if (v < best.value) {
      best.value = v;
      best.w_star = w_star;
    }
  }
  best.value = std::clamp(best.value, 0.0, 1.0);
  return best;
}

double psi_bivariate(double rho, double x, double y) {
  if (!(std::abs(rho) < 1.0))
    throw std::invalid_argument("|rho| must be < 1");
  // Phi/Q are flat to machine precision beyond ~38 sigma.
  x = std::clamp(x, -38.0, 38.0);
  y = std::clamp(y, -38.0, 38.0);
  const double denom = std::sqrt(1.0 - rho * rho);
  const double inv_sqrt_2pi = 0.39894228040143267794;
  auto integrand = [&](double z) {
    return inv_sqrt_2pi * std::exp(-0.5 * z * z) *
           q_func((y - rho * z) / denom);
  };
  double err = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, x, 38.0, 12, 1e-12, &err);
  return std::clamp(v, 0.0, 1.0);
}

double kat_beta_term(const Wef& subset_wef, int w, int w_min, NoiseModel noise) {
  const double sigma = noise.sigma;
  const double sw = std::sqrt(static_cast<double>(w)) / sigma;
  double aw = subset_wef.coef[static_cast<std::size_t>(w)];
  // Same-weight pairs share correlation 1 - w_min/(2w); cross-weight pairs
  // use the minimum-overlap correlation bound.
  double beta = (aw - 1.0) *
                psi_bivariate(1.0 - static_cast<double>(w_min) / (2.0 * w), sw, sw);
  for (int t = 1; t <= subset_wef.length; ++t) {
    if (t == w) continue;
    double at = subset_wef.coef[static_cast<std::size_t>(t)];
    if (at <= 0.0) continue;
    double wd = static_cast<double>(w), td = static_cast<double>(t);
    double kappa = std::min({wd / td, td / wd,
                             (wd + td - static_cast<double>(w_min)) /
                                 (2.0 * std::sqrt(wd * td))});
    beta += at * psi_bivariate(kappa, sw, std::sqrt(td) / sigma);
  }
  // Fractional ensemble coefficients below 1 can push the same-weight term
  // negative; clamp to keep the assembled bound evaluable.
  return std::max(beta, 0.0);
}

double kat_bound(const Wef& subset_wef, int w_min, NoiseModel noise) {
  if (static_cast<int>(subset_wef.coef.size()) != subset_wef.length + 1)
    throw std::invalid_argument("WEF coefficient size mismatch");
  bool any = false;
  for (int w = 1; w <= subset_wef.length; ++w)
    if (subset_wef.coef[static_cast<std::size_t>(w)] > 0.0) any = true;
  if (!any) return 0.0;
  const double sigma = noise.sigma;
  double total = 0.0;
  for (int w = 1; w <= subset_wef.length; ++w) {
    double aw = subset_wef.coef[static_cast<std::size_t>(w)];
    if (aw <= 0.0) continue;
    double alpha = q_func(std::sqrt(static_cast<double>(w)) / sigma);
    if (alpha <= 0.0) continue;  // tail underflow: no contribution
    double beta = kat_beta_term(subset_wef, w, w_min, noise);
    double ratio = beta / alpha;
    double theta = ratio - std::floor(ratio);
    double d1 = (2.0 - theta) * alpha + beta;
    double d2 = (1.0 - theta) * alpha + beta;
    double term = 0.0;
    if (d1 > 0.0) term += theta / d1;
    if (d2 > 0.0) term += (1.0 - theta) / d2;
    total += aw * alpha * alpha * term;
  }
  return std::clamp(total, 0.0, 1.0);
}

BoundResult iterative_lower_bound(const Wef& wef, NoiseModel noise) {
  int w_min = 0;
  for (int w = 1; w <= wef.length; ++w) {
    if (wef.coef[static_cast<std::size_t>(w)] > 0.0) {
      w_min = w;
      break;
    }
  }
  if (w_min == 0)
    throw std::invalid_argument("spectrum has no nonzero weight");
  Wef subset;
  subset.length = wef.length;
  subset.coef.assign(static_cast<std::size_t>(wef.length) + 1, 0.0);
  subset.coef[static_cast<std::size_t>(w_min)] =
      wef.coef[static_cast<std::size_t>(w_min)];
  BoundResult res;
  res.included_weights.push_back(w_min);
  res.value = kat_bound(subset, w_min, noise);
  for (int w = w_min + 1; w <= wef.length; ++w) {
    double aw = wef.coef[static_cast<std::size_t>(w)];
    if (aw <= 0.0) continue;
    subset.coef[static_cast<std::size_t>(w)] = aw;
    double v = kat_bound(subset, w_min, noise);
    if (v < res.value) break;
    res.value = v;
    res.included_weights.push_back(w);
  }
  return res;
}

}  // namespace bbtpolar
