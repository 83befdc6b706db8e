#pragma once

#include <vector>

#include "bbtpolar/spectrum.hpp"

namespace bbtpolar {

// AWGN with unit-energy antipodal signaling; sigma is the per-dimension
// noise standard deviation.
struct NoiseModel {
  double sigma = 1.0;
};

struct BoundResult {
  double value = 0.0;
  int w_star = 0;                     // upper bound optimizer
  std::vector<int> included_weights;  // lower bound subset
};

// Gaussian tail Q(x).
double q_func(double x);

// Binomial tail sum_{m=N_l}^{N_u} C(N_t,m) p^m (1-p)^{N_t-m}, restricted to
// m in [0, N_t]; empty range gives 0. Log-domain inner terms.
double e0_tail(double p, int n_t, int n_l, int n_u);

// Frame-error upper bound under ML decoding: per-weight min of the two
// conditional bounds plus the Hamming-shell tail, minimized over the shell
// radius w*.
BoundResult fer_upper_bound(const Wef& wef, NoiseModel noise);
// The objective at a fixed w* (exposed for verification).
double fer_upper_bound_objective(const Wef& wef, NoiseModel noise, int w_star);

// Upper-orthant probability of a standard bivariate normal with
// correlation rho, to 1e-10 absolute.
double psi_bivariate(double rho, double x, double y);

// Pairwise-overlap assembly feeding the lower bound; exposed separately so
// its reading of the correlation arguments can be tested on its own.
double kat_beta_term(const Wef& subset_wef, int w, int w_min, NoiseModel noise);

// Lower bound on the probability of the union of pairwise error events for
// the codeword subset described by subset_wef (weights >= 1 only).
double kat_bound(const Wef& subset_wef, int w_min, NoiseModel noise);

// Greedy subset growth: start at w_min, add weights in increasing order,
// stop at the first decrease, return the best value seen.
BoundResult iterative_lower_bound(const Wef& wef, NoiseModel noise);

}  // namespace bbtpolar
