#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "drbracket.hpp"
#include "numbase.hpp"

namespace drfaber {

// Lattice-path counting behind the coefficient calculus. A path in Z^m steps
// down one coordinate at a time (p_j - p_{j+1} = e_k). For a subset I of the
// coordinates, w_I(c) counts paths from c to the 0/1 indicator point of I
// whose points all avoid the indicator points of every other subset (the
// endpoint itself is the one allowed indicator point).

using LatticePoint = std::vector<long long>;

/// Unconstrained decreasing paths from c to the origin:
/// (sum c_i)!/(c_1!...c_m!) when all c_i >= 0, else 0.
inline Int w0(const LatticePoint& c) {
  for (long long x : c)
    if (x < 0) return 0;
  return multinomial(c);
}

namespace detail {

inline void check_subset(const std::vector<int>& I, std::size_t m) {
  if (I.empty()) throw std::invalid_argument("w_I: subset must be nonempty");
  std::vector<bool> seen(m, false);
  for (int i : I) {
    if (i < 0 || static_cast<std::size_t>(i) >= m)
      throw std::invalid_argument("w_I: subset index out of range");
    if (seen[i]) throw std::invalid_argument("w_I: repeated subset index");
    seen[i] = true;
  }
}

inline LatticePoint indicator(const std::vector<int>& I, std::size_t m) {
  LatticePoint e(m, 0);
  for (int i : I) e[i] = 1;
  return e;
}

}  // namespace detail

/// Closed form: w_I(c) = 1 when c is the indicator point of I, otherwise
/// sum_{k in I} w0(c - indicator(I) - e_k). I holds 0-based coordinates.
inline Int wI_closed(const std::vector<int>& I, const LatticePoint& c) {
  detail::check_subset(I, c.size());
  const LatticePoint target = detail::indicator(I, c.size());
  if (c == target) return 1;
  Int total = 0;
  for (int k : I) {
    LatticePoint shifted = c;
    for (std::size_t i = 0; i < c.size(); ++i) shifted[i] -= target[i];
    shifted[k] -= 1;
    total += w0(shifted);
  }
  return total;
}

/// Exhaustive enumeration of the same paths, as an independent oracle.
/// Capped at m <= 5 and coordinates in [0, 6].
inline Int wI_bruteforce(const std::vector<int>& I, const LatticePoint& c) {
  const std::size_t m = c.size();
  detail::check_subset(I, m);
  if (m > 5)
    throw std::invalid_argument("wI_bruteforce: scale bound exceeded (m <= 5)");
  for (long long x : c)
    if (x < 0 || x > 6)
      throw std::invalid_argument(
          "wI_bruteforce: scale bound exceeded (coords in [0,6])");

  const LatticePoint target = detail::indicator(I, m);
  long long target_sum = 0;
  for (long long x : target) target_sum += x;

  std::map<LatticePoint, Int> memo;
  const std::function<Int(const LatticePoint&)> count =
      [&](const LatticePoint& p) -> Int {
    if (p == target) return 1;
    long long sum = 0;
    for (long long x : p) {
      if (x < 0) return 0;
      sum += x;
    }
    // any other 0/1 point is a forbidden indicator point
    if (std::all_of(p.begin(), p.end(),
                    [](long long x) { return x == 0 || x == 1; }))
      return 0;
    if (sum <= target_sum) return 0;
    if (const auto it = memo.find(p); it != memo.end()) return it->second;
    Int total = 0;
    LatticePoint next = p;
    for (std::size_t k = 0; k < m; ++k) {
      next[k] -= 1;
      total += count(next);
      next[k] += 1;
    }
    memo.emplace(p, total);
    return total;
  };
  return count(c);
}

/// Index of a coefficient bracket <prod |p_i; c_i|>: the coefficient of the
/// monomial prod a_i^{p_i} in a bracket polynomial with psi powers c_i,
/// normalized by (2g)!/(p_1!...p_m!).
struct CoeffEntry {
  long long p = 0;
  long long c = 0;
  friend bool operator==(const CoeffEntry&, const CoeffEntry&) = default;
};

struct CoeffKey {
  int g = 1;
  std::vector<CoeffEntry> entries;
};

/// Closed-form coefficient bracket via path counting:
///   sum over nonempty I of [prod_{i=1}^{|I|}(2g+i-1) / prod_{i in I}(p_i+c_i)] w_I(c).
/// Keys with sum p != 2g or sum c != m-1 are absent and give zero. The
/// one-column key |2g;0| is the seed coefficient and equals 1 (the path sum
/// does not cover m = 1). Requires p_i + c_i >= 1 for every column.
inline Rational coeff_bracket(const CoeffKey& key) {
  const std::size_t m = key.entries.size();
  if (m == 0)
    throw std::invalid_argument("coeff_bracket: needs at least one column");
  if (key.g < 1) throw std::invalid_argument("coeff_bracket: genus must be >= 1");
  long long psum = 0, csum = 0;
  for (const CoeffEntry& e : key.entries) {
    if (e.p < 0 || e.c < 0)
      throw std::invalid_argument("coeff_bracket: negative index");
    if (e.p + e.c < 1)
      throw std::invalid_argument("coeff_bracket: requires p + c >= 1");
    psum += e.p;
    csum += e.c;
  }
  const int g = key.g;
  if (psum != 2 * g || csum != static_cast<long long>(m) - 1)
    return Rational(0);
  if (m == 1) return Rational(1);

  LatticePoint cbar(m);
  for (std::size_t i = 0; i < m; ++i) cbar[i] = key.entries[i].c;

  Rational total = 0;
  for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
    std::vector<int> I;
    for (std::size_t i = 0; i < m; ++i)
      if (mask & (std::size_t{1} << i)) I.push_back(static_cast<int>(i));
    const Int paths = wI_closed(I, cbar);
    if (paths == 0) continue;
    Int num = paths;
    for (std::size_t i = 1; i <= I.size(); ++i)
      num *= 2 * g + static_cast<long long>(i) - 1;
    Int den = 1;
    for (int i : I) den *= key.entries[i].p + key.entries[i].c;
    total += Rational(num) / Rational(den);
  }
  return total;
}

/// The same coefficient read off the interpolated bracket polynomial
/// (Simplified mode): coefficient of the monomial, divided by
/// (2g)!/(p_1!...p_n!).
inline Rational coeff_from_polynomial(int g, const std::vector<int>& dvec,
                                      const Expo& expo, MemoStore& store) {
  if (expo.size() != dvec.size())
    throw std::invalid_argument("coeff_from_polynomial: length mismatch");
  long long psum = 0;
  for (int p : expo) {
    if (p < 0)
      throw std::invalid_argument("coeff_from_polynomial: negative exponent");
    psum += p;
  }
  if (psum != 2 * g)
    throw std::invalid_argument(
        "coeff_from_polynomial: exponents must sum to 2g");
  const MPoly poly = bracket_polynomial(g, dvec, Mode::Simplified, store);
  std::vector<long long> ps(expo.begin(), expo.end());
  return poly.coefficient_of(expo) / Rational(multinomial(ps));
}

/// Column-merge identity for coefficient brackets: with two trailing |p;0|
/// columns (p >= 1 each),
///   <... |p_{m-1};0| |p_m;0|> = sum_i <... |p_i+1;c_i-1| ... |p_{m-1}+p_m-1;0|>
/// where the sum runs over the leading columns with c_i >= 1. Returns whether
/// both sides agree under coeff_bracket.
inline bool coefreduction_check(int g, const std::vector<CoeffEntry>& entries) {
  const std::size_t m = entries.size();
  if (m < 2)
    throw std::invalid_argument("coefreduction_check: needs two trailing columns");
  const CoeffEntry& last = entries[m - 1];
  const CoeffEntry& prev = entries[m - 2];
  if (last.c != 0 || prev.c != 0 || last.p < 1 || prev.p < 1)
    throw std::invalid_argument(
        "coefreduction_check: trailing columns must be |p;0| with p >= 1");
  const Rational lhs = coeff_bracket({g, entries});
  Rational rhs = 0;
  for (std::size_t i = 0; i + 2 < m; ++i) {
    if (entries[i].c < 1) continue;
    std::vector<CoeffEntry> mod(entries.begin(), entries.end() - 2);
    mod[i].p += 1;
    mod[i].c -= 1;
    mod.push_back(CoeffEntry{prev.p + last.p - 1, 0});
    rhs += coeff_bracket({g, mod});
  }
  return lhs == rhs;
}

}  // namespace drfaber
