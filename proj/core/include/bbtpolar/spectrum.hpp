#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bbtpolar/codec.hpp"

namespace bbtpolar {

// Weight enumerator A(X) = sum_w coef[w] X^w. Ensemble averages carry
// non-integer coefficients; concrete enumerations stay integral.
struct Wef {
  int length = 0;
  std::vector<double> coef;  // size length+1

  static Wef zero_code(int length);  // A(X) = 1
  double mass() const;               // sum of all coefficients
};

// Average WEF of the composite ensemble (v* boxplus (v°,0)Pi, v°) over a
// uniform random permutation Pi, from the WEFs of the two constituents.
// Requires left.length >= right.length.
Wef compose_wef(const Wef& left, const Wef& right);

// Recursive ensemble estimate over the code tree: leaves start at 1+X
// (active) or 1 (frozen), internal nodes compose bottom-up.
Wef estimate_wef(const CodeSpec& spec);
Wef estimate_wef(const Code& code);

// Exact WEF by enumerating all 2^K codewords. K capped at 24.
Wef brute_force_wef(const CodeSpec& spec);
Wef brute_force_wef(const Code& code);
inline constexpr int kBruteForceMaxK = 24;

// Minimum nonzero Hamming weight and its codeword multiplicity, by the
// bottom-up indicator recursion. Multiplicity is exact below 2^53.
struct MhwRecord {
  bool is_non_zero = false;
  int w_min = 0;
  double multiplicity = 0.0;
};

MhwRecord mhw_spectrum(const CodeSpec& spec);
MhwRecord mhw_spectrum(const Code& code);

// Cross-check of the recursion against other spectrum routes; divergences
// are expected for some info sets and must be surfaced, not dropped.
struct MhwDivergence {
  MhwRecord recursion;
  std::optional<int> enumerated_w_min;   // from brute force when K <= cap
  std::optional<int> estimate_first_w;   // first nonzero weight of estimate_wef
  bool diverges = false;
  std::string note;
};

MhwDivergence mhw_divergence_report(const CodeSpec& spec);

}  // namespace bbtpolar
