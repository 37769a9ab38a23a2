#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "numbase.hpp"

namespace drfaber {

using Expo = std::vector<int>;  // exponent vector

// Graded-lexicographic order, highest term first: larger total degree wins,
// ties break lexicographically. Also the print order of the text format.
struct GrlexDesc {
  bool operator()(const Expo& x, const Expo& y) const {
    const long long dx = std::accumulate(x.begin(), x.end(), 0LL);
    const long long dy = std::accumulate(y.begin(), y.end(), 0LL);
    if (dx != dy) return dx > dy;
    return std::lexicographical_compare(y.begin(), y.end(), x.begin(),
                                        x.end());
  }
};

// Sparse multivariate polynomial over Rational. Invariants: no zero
// coefficient is ever stored and every exponent vector has length nvars().
class MPoly {
 public:
  using TermMap = std::map<Expo, Rational, GrlexDesc>;

  explicit MPoly(int nvars) : nvars_(nvars) {
    if (nvars < 0) throw std::invalid_argument("MPoly: negative nvars");
  }

  static MPoly constant(int nvars, const Rational& c) {
    MPoly p(nvars);
    p.add_term(Expo(nvars, 0), c);
    return p;
  }

  static MPoly monomial(int nvars, Expo e, const Rational& c) {
    MPoly p(nvars);
    p.add_term(std::move(e), c);
    return p;
  }

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }

  /// Accumulates c onto the monomial with exponents e; drops the term if the
  /// coefficient cancels to zero.
  void add_term(Expo e, const Rational& c) {
    check_expo(e);
    if (c == 0) return;
    auto [it, fresh] = terms_.try_emplace(std::move(e), c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  MPoly& operator+=(const MPoly& o) {
    check_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }

  MPoly& operator-=(const MPoly& o) {
    check_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }

  MPoly& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend MPoly operator+(MPoly a, const MPoly& b) { return a += b; }
  friend MPoly operator-(MPoly a, const MPoly& b) { return a -= b; }
  friend MPoly operator*(MPoly a, const Rational& s) { return a *= s; }

  friend MPoly operator*(const MPoly& a, const MPoly& b) {
    a.check_same(b);
    MPoly r(a.nvars_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Expo e = ea;
        for (int i = 0; i < a.nvars_; ++i) e[i] += eb[i];
        r.add_term(std::move(e), ca * cb);
      }
    return r;
  }

  friend bool operator==(const MPoly& a, const MPoly& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  Rational eval(std::span<const Rational> point) const {
    if (static_cast<int>(point.size()) != nvars_)
      throw std::invalid_argument("MPoly::eval: point length mismatch");
    // per-variable power tables
    std::vector<std::vector<Rational>> pow(nvars_);
    for (int i = 0; i < nvars_; ++i) pow[i].push_back(Rational(1));
    Rational total = 0;
    for (const auto& [e, c] : terms_) {
      Rational term = c;
      for (int i = 0; i < nvars_; ++i) {
        while (static_cast<int>(pow[i].size()) <= e[i])
          pow[i].push_back(pow[i].back() * point[i]);
        term *= pow[i][e[i]];
      }
      total += term;
    }
    return total;
  }

  Rational eval_int(std::span<const int> point) const {
    std::vector<Rational> p(point.begin(), point.end());
    return eval(p);
  }

  Rational coefficient_of(const Expo& e) const {
    check_expo(e);
    const auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  /// Coefficient of var^power as a polynomial in the remaining variables
  /// (order preserved). Negative powers give the zero polynomial.
  MPoly coefficient_in_var(int var, int power) const {
    if (var < 0 || var >= nvars_)
      throw std::invalid_argument("MPoly::coefficient_in_var: bad variable");
    MPoly r(nvars_ - 1);
    if (power < 0) return r;
    for (const auto& [e, c] : terms_) {
      if (e[var] != power) continue;
      Expo rest;
      rest.reserve(nvars_ - 1);
      for (int i = 0; i < nvars_; ++i)
        if (i != var) rest.push_back(e[i]);
      r.add_term(std::move(rest), c);
    }
    return r;
  }

  /// Drops every monomial whose exponents are all >= 1, i.e. the monomials
  /// divisible by the product of all variables.
  MPoly strip_monomials_divisible_by_all() const {
    MPoly r(nvars_);
    for (const auto& [e, c] : terms_) {
      const bool all_positive =
          std::all_of(e.begin(), e.end(), [](int x) { return x >= 1; });
      if (!all_positive) r.add_term(e, c);
    }
    return r;
  }

 private:
  void check_expo(const Expo& e) const {
    if (static_cast<int>(e.size()) != nvars_)
      throw std::invalid_argument("MPoly: exponent vector length mismatch");
    for (int x : e)
      if (x < 0) throw std::invalid_argument("MPoly: negative exponent");
  }
  void check_same(const MPoly& o) const {
    if (nvars_ != o.nvars_)
      throw std::invalid_argument("MPoly: nvars mismatch");
  }

  int nvars_;
  TermMap terms_;
};

/// (x_1 + ... + x_nvars)^k, by multinomial expansion.
inline MPoly pow_of_var_sum(int nvars, int k) {
  if (k < 0) throw std::invalid_argument("pow_of_var_sum: negative power");
  MPoly r(nvars);
  Expo e(nvars, 0);
  const std::function<void(int, int)> emit = [&](int var, int left) {
    if (var == nvars - 1) {
      e[var] = left;
      std::vector<long long> parts(e.begin(), e.end());
      r.add_term(e, Rational(multinomial(parts)));
      return;
    }
    for (int take = 0; take <= left; ++take) {
      e[var] = take;
      emit(var + 1, left - take);
    }
  };
  if (nvars == 0) {
    if (k == 0) return MPoly::constant(0, Rational(1));
    return r;  // empty sum to a positive power
  }
  emit(0, k);
  return r;
}

namespace detail {

inline std::vector<MPoly> lagrange_basis(int nvars, int var, int bound) {
  // basis[t-1](x) = prod_{s != t} (x_var - s)/(t - s), nodes 1..bound+1
  std::vector<MPoly> basis;
  basis.reserve(bound + 1);
  for (int t = 1; t <= bound + 1; ++t) {
    MPoly num = MPoly::constant(nvars, Rational(1));
    Rational den = 1;
    for (int s = 1; s <= bound + 1; ++s) {
      if (s == t) continue;
      MPoly lin(nvars);
      Expo e(nvars, 0);
      e[var] = 1;
      lin.add_term(std::move(e), Rational(1));
      lin.add_term(Expo(nvars, 0), Rational(-s));
      num = num * lin;
      den *= t - s;
    }
    num *= Rational(1) / den;
    basis.push_back(std::move(num));
  }
  return basis;
}

inline MPoly interpolate_rec(
    int nvars, int k, int bound,
    const std::function<Rational(const std::vector<int>&)>& evaluator,
    std::vector<int>& point) {
  if (k == 0) return MPoly::constant(nvars, evaluator(point));
  const auto basis = lagrange_basis(nvars, k - 1, bound);
  MPoly acc(nvars);
  for (int t = 1; t <= bound + 1; ++t) {
    point[k - 1] = t;
    acc += interpolate_rec(nvars, k - 1, bound, evaluator, point) *
           basis[t - 1];
  }
  point[k - 1] = 0;
  return acc;
}

}  // namespace detail

/// Iterated univariate Lagrange interpolation on the integer grid
/// {1, ..., bound+1}^nvars. When the evaluator is a polynomial of degree
/// <= bound in each variable the result reproduces it exactly.
inline MPoly interpolate_grid(
    int nvars, int per_var_degree_bound,
    const std::function<Rational(const std::vector<int>&)>& evaluator) {
  if (nvars < 0) throw std::invalid_argument("interpolate_grid: bad nvars");
  if (per_var_degree_bound < 0)
    throw std::invalid_argument("interpolate_grid: bad degree bound");
  std::vector<int> point(nvars, 0);
  return detail::interpolate_rec(nvars, nvars, per_var_degree_bound,
                                 evaluator, point);
}

/// Text format: graded-lex descending terms "<coeff>*a1^e1*...*an^en" with
/// zero-exponent factors omitted, joined by " + ". Zero prints as "0".
inline std::string poly_text(const MPoly& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : p.terms()) {
    if (!first) os << " + ";
    first = false;
    os << rat_str(c);
    for (int i = 0; i < p.nvars(); ++i)
      if (e[i] != 0) os << "*a" << i + 1 << "^" << e[i];
  }
  return os.str();
}

}  // namespace drfaber
