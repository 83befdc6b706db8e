#include "bbtpolar/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bbtpolar {

Wef Wef::zero_code(int length) {
  Wef w;
  w.length = length;
  w.coef.assign(static_cast<std::size_t>(length) + 1, 0.0);
  w.coef[0] = 1.0;
  return w;
}

double Wef::mass() const {
  double s = 0.0, c = 0.0;
  for (double v : coef) {
    double y = v - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

namespace {

// Exact binomial table as doubles; C(56,28) still fits the 53-bit mantissa.
class Pascal {
 public:
  explicit Pascal(int n) : n_(n), c_(static_cast<std::size_t>(n + 1) *
                                     static_cast<std::size_t>(n + 1), 0.0) {
    for (int i = 0; i <= n; ++i) {
      at(i, 0) = 1.0;
      for (int j = 1; j <= i; ++j)
        at(i, j) = get(i - 1, j - 1) + get(i - 1, j);
    }
  }
  double get(int i, int j) const {
    if (j < 0 || j > i) return 0.0;
    return c_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_ + 1) +
              static_cast<std::size_t>(j)];
  }

 private:
  double& at(int i, int j) {
    return c_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_ + 1) +
              static_cast<std::size_t>(j)];
  }
  int n_;
  std::vector<double> c_;
};

double log_choose(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

Wef compose_wef(const Wef& left, const Wef& right) {
  const int ls = left.length;   // l*
  const int lc = right.length;  // l°
  if (ls < lc) throw std::invalid_argument("left constituent must not be shorter");
  if (static_cast<int>(left.coef.size()) != ls + 1 ||
      static_cast<int>(right.coef.size()) != lc + 1)
    throw std::invalid_argument("WEF coefficient size mismatch");

  Wef out;
  out.length = ls + lc;
  out.coef.assign(static_cast<std::size_t>(out.length) + 1, 0.0);
  std::vector<double> comp(out.coef.size(), 0.0);  // Kahan compensation

  const bool small = ls <= 50;
  Pascal pascal(small ? ls : 0);

  // A weight-i right word, zero-padded and uniformly permuted over the l*
  // positions, overlaps a fixed weight-a left word in t positions with
  // hypergeometric probability C(a,t) C(l*-a, i-t) / C(l*, i). The
  // composite word (v_left xor permuted, v_right) then has weight
  // (a + i - 2t) + i.
  for (int a = 0; a <= ls; ++a) {
    if (left.coef[static_cast<std::size_t>(a)] == 0.0) continue;
    for (int i = 0; i <= lc; ++i) {
      double ar = right.coef[static_cast<std::size_t>(i)];
      if (ar == 0.0) continue;
      double pair_mass = left.coef[static_cast<std::size_t>(a)] * ar;
      int t_lo = std::max(0, a + i - ls);
      int t_hi = std::min(a, i);
      for (int t = t_lo; t <= t_hi; ++t) {
        double prob;
        if (small) {
          prob = pascal.get(a, t) * pascal.get(ls - a, i - t) / pascal.get(ls, i);
        } else {
          prob = std::exp(log_choose(a, t) + log_choose(ls - a, i - t) -
                          log_choose(ls, i));
        }
        int w = a + 2 * i - 2 * t;
        double add = pair_mass * prob;
        double y = add - comp[static_cast<std::size_t>(w)];
        double s = out.coef[static_cast<std::size_t>(w)] + y;
        comp[static_cast<std::size_t>(w)] = (s - out.coef[static_cast<std::size_t>(w)]) - y;
        out.coef[static_cast<std::size_t>(w)] = s;
      }
    }
  }
  return out;
}

namespace {

Wef estimate_node(const BbtTree& tree, NodeId id,
                  const std::vector<std::uint8_t>& active) {
  if (tree.is_leaf(id)) {
    Wef w;
    w.length = 1;
    if (active[static_cast<std::size_t>(tree.offset_of(id))])
      w.coef = {1.0, 1.0};
    else
      w.coef = {1.0, 0.0};
    return w;
  }
  Wef left = estimate_node(tree, BbtTree::left_child(id), active);
  Wef right = estimate_node(tree, BbtTree::right_child(id), active);
  return compose_wef(left, right);
}

}  // namespace

Wef estimate_wef(const Code& code) {
  std::vector<std::uint8_t> active(
      static_cast<std::size_t>(code.block_length()), 0);
  for (int idx : code.spec().info_set) active[static_cast<std::size_t>(idx)] = 1;
  return estimate_node(code.tree(), BbtTree::root(), active);
}

Wef estimate_wef(const CodeSpec& spec) { return estimate_wef(Code(spec)); }

Wef brute_force_wef(const Code& code) {
  const int k = code.dimension();
  const int n = code.block_length();
  if (k > kBruteForceMaxK)
    throw std::invalid_argument("brute force limited to K <= 24");
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Bits> rows = code.generator_rows();
  Bits word(static_cast<std::size_t>(n), 0);
  counts[0] = 1;
  // Gray-code walk: one row toggle per step.
  std::uint64_t total = 1ull << k;
  std::uint64_t gray_prev = 0;
  for (std::uint64_t m = 1; m < total; ++m) {
    std::uint64_t gray = m ^ (m >> 1);
    std::uint64_t diff = gray ^ gray_prev;
    int row = 0;
    while (!((diff >> row) & 1ull)) ++row;
    const Bits& r = rows[static_cast<std::size_t>(row)];
    int weight = 0;
    for (int j = 0; j < n; ++j) {
      word[static_cast<std::size_t>(j)] ^= r[static_cast<std::size_t>(j)];
      weight += word[static_cast<std::size_t>(j)];
    }
    ++counts[static_cast<std::size_t>(weight)];
    gray_prev = gray;
  }
  Wef w;
  w.length = n;
  w.coef.assign(counts.begin(), counts.end());
  return w;
}

Wef brute_force_wef(const CodeSpec& spec) { return brute_force_wef(Code(spec)); }

namespace {

struct MhwState {
  bool non_zero = false;
  long long w = 0;
  double mult = 0.0;
};

MhwState mhw_node(const BbtTree& tree, NodeId id,
                  const std::vector<std::uint8_t>& active) {
  if (tree.is_leaf(id)) {
    MhwState st;
    if (active[static_cast<std::size_t>(tree.offset_of(id))]) {
      st.non_zero = true;
      st.w = 1;
      st.mult = 1.0;
    }
    return st;
  }
  MhwState l = mhw_node(tree, BbtTree::left_child(id), active);
  MhwState r = mhw_node(tree, BbtTree::right_child(id), active);
  MhwState p;
  if (!l.non_zero && !r.non_zero) return p;
  p.non_zero = true;
  if (l.non_zero && !r.non_zero) {
    p.w = l.w;
    p.mult = l.mult;
  } else if (!l.non_zero && r.non_zero) {
    p.w = 2 * r.w;
    p.mult = r.mult;
  } else {
    p.w = std::max(l.w, 2 * r.w - l.w);
    p.mult = (l.w == r.w) ? 2.0 * l.mult * r.mult : l.mult * r.mult;
  }
  return p;
}

}  // namespace

MhwRecord mhw_spectrum(const Code& code) {
  std::vector<std::uint8_t> active(
      static_cast<std::size_t>(code.block_length()), 0);
  for (int idx : code.spec().info_set) active[static_cast<std::size_t>(idx)] = 1;
  MhwState st = mhw_node(code.tree(), BbtTree::root(), active);
  MhwRecord rec;
  rec.is_non_zero = st.non_zero;
  if (st.non_zero) {
    rec.w_min = static_cast<int>(st.w);
    rec.multiplicity = st.mult;
  }
  return rec;
}

MhwRecord mhw_spectrum(const CodeSpec& spec) { return mhw_spectrum(Code(spec)); }

MhwDivergence mhw_divergence_report(const CodeSpec& spec) {
  Code code(spec);
  MhwDivergence rep;
  rep.recursion = mhw_spectrum(code);
  Wef est = estimate_wef(code);
  for (int w = 1; w <= est.length; ++w) {
    if (est.coef[static_cast<std::size_t>(w)] > 1e-12) {
      rep.estimate_first_w = w;
      break;
    }
  }
  if (code.dimension() <= kBruteForceMaxK) {
    Wef exact = brute_force_wef(code);
    for (int w = 1; w <= exact.length; ++w) {
      if (exact.coef[static_cast<std::size_t>(w)] > 0.0) {
        rep.enumerated_w_min = w;
        break;
      }
    }
  }
  if (rep.recursion.is_non_zero) {
    if (rep.enumerated_w_min && *rep.enumerated_w_min != rep.recursion.w_min) {
      rep.diverges = true;
      rep.note = "recursion w_min " + std::to_string(rep.recursion.w_min) +
                 " vs enumerated " + std::to_string(*rep.enumerated_w_min);
    } else if (rep.estimate_first_w &&
               *rep.estimate_first_w < rep.recursion.w_min) {
      rep.diverges = true;
      rep.note = "estimated spectrum has mass at weight " +
                 std::to_string(*rep.estimate_first_w) +
                 " below recursion w_min " + std::to_string(rep.recursion.w_min);
    }
  } else if (rep.enumerated_w_min) {
    rep.diverges = true;
    rep.note = "recursion reports zero-only code but enumeration found weight " +
               std::to_string(*rep.enumerated_w_min);
  }
  return rep;
}

}  // namespace bbtpolar
