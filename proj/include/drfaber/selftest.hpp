#pragma once

#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "faber.hpp"

namespace drfaber {

// Runnable property suites covering every module, shared by the CLI selftest
// and the acceptance harness. Quick scale keeps genus <= 2; Full scale runs
// the complete desk-scale ranges.

enum class SelftestScale { Quick, Full };

struct SuiteResult {
  std::string name;
  long long checks = 0;
  long long failures = 0;
};

struct SelftestReport {
  std::vector<SuiteResult> suites;

  long long checks() const {
    long long total = 0;
    for (const auto& s : suites) total += s.checks;
    return total;
  }
  long long failures() const {
    long long total = 0;
    for (const auto& s : suites) total += s.failures;
    return total;
  }
  bool pass() const { return failures() == 0; }
};

namespace selftest_detail {

struct Checker {
  long long checks = 0;
  long long failures = 0;
  void require(bool ok) {
    ++checks;
    if (!ok) ++failures;
  }
};

inline std::vector<std::vector<int>> compositions(int total, int slots) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(slots, 0);
  const std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == slots - 1) {
      cur[i] = left;
      out.push_back(cur);
      return;
    }
    for (int take = 0; take <= left; ++take) {
      cur[i] = take;
      rec(i + 1, left - take);
    }
  };
  if (slots >= 1) rec(0, total);
  return out;
}

inline void check_combinatorics(Checker& ck) {
  ck.require(factorial(0) == 1);
  ck.require(factorial(9) == 362880);
  ck.require(double_factorial_odd(0) == 1);
  ck.require(double_factorial_odd(4) == 105);
  ck.require(multinomial({2, 1}) == 3);
  ck.require(multinomial({2, 2}) == 6);

  std::mt19937_64 rng(1001);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    std::vector<long long> parts(n);
    long long budget = 30, total = 0;
    for (auto& p : parts) {
      p = static_cast<long long>(rng() % (budget + 1));
      budget -= p;
      total += p;
    }
    const Int m = multinomial(parts);
    std::vector<long long> shuffled = parts;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    ck.require(multinomial(shuffled) == m);
    Int prod = m;
    for (long long p : parts) prod *= factorial(p);
    ck.require(prod == factorial(total));
  }

  const auto rnd_rat = [&rng] {
    return Rational(static_cast<long long>(rng() % 101) - 50) /
           Rational(static_cast<long long>(rng() % 50) + 1);
  };
  for (int trial = 0; trial < 60; ++trial) {
    const Rational a = rnd_rat(), b = rnd_rat(), c = rnd_rat();
    ck.require((a + b) + c == a + (b + c));
    ck.require((a * b) * c == a * (b * c));
    ck.require(a * (b + c) == a * b + a * c);
    ck.require((a + b) - b == a);
  }
}

inline void check_polynomial_infra(Checker& ck) {
  std::mt19937_64 rng(2002);
  for (int trial = 0; trial < 8; ++trial) {
    const int nvars = 1 + static_cast<int>(rng() % 3);
    const int bound = 1 + static_cast<int>(rng() % 3);
    MPoly p(nvars);
    for (int t = 0; t < 6; ++t) {
      Expo e(nvars);
      for (auto& x : e) x = static_cast<int>(rng() % (bound + 1));
      p.add_term(std::move(e),
                 Rational(static_cast<long long>(rng() % 19) - 9));
    }
    const MPoly got = interpolate_grid(
        nvars, bound,
        [&](const std::vector<int>& x) { return p.eval_int(x); });
    ck.require(got == p);
    for (int j = 0; j < 10; ++j) {
      std::vector<int> x(nvars);
      for (auto& xi : x)
        xi = bound + 2 + static_cast<int>(rng() % 30);
      ck.require(got.eval_int(x) == p.eval_int(x));
    }
    const MPoly once = p.strip_monomials_divisible_by_all();
    ck.require(once.strip_monomials_divisible_by_all() == once);
  }
}

inline void check_bracket_recursion(Checker& ck, MemoStore& store) {
  ck.require(genusg_bracket(2, {{3, 0}}, Mode::Simplified, store) == 81);
  ck.require(genusg_bracket(1, {{1, 0}}, Mode::Exact, store) == 0);
  ck.require(genusg_bracket(1, {{1, 1}, {1, 0}}, Mode::Simplified, store) ==
             5);
  ck.require(genusg_bracket(1, {{1, 1}, {1, 1}, {1, 0}}, Mode::Simplified,
                            store) == 28);
  ck.require(detail::eval_bracket(2, {{1, 2}, {1, 0}}, Mode::Simplified,
                                  store) == 0);

  // permutation symmetry
  std::mt19937_64 rng(3003);
  const std::vector<Part> base{{2, 1}, {3, 1}, {1, 0}, {5, 1}};
  const Rational expect = genusg_bracket(2, base, Mode::Simplified, store);
  std::vector<Part> shuffled = base;
  for (int trial = 0; trial < 6; ++trial) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    ck.require(genusg_bracket(2, shuffled, Mode::Simplified, store) == expect);
  }

  // elimination order independence, g <= 2, n <= 3
  for (int g = 1; g <= 2; ++g)
    for (int n = 2; n <= 3; ++n)
      for (const auto& dvec : compositions(n - 1, n)) {
        std::vector<Part> parts(n);
        for (int i = 0; i < n; ++i) parts[i] = Part{i + 1, dvec[i]};
        const Rational value =
            genusg_bracket(g, parts, Mode::Simplified, store);
        BracketKey key{g, parts, Mode::Simplified};
        key.canonicalize();
        for (std::size_t pivot = 0; pivot < key.parts.size(); ++pivot) {
          if (key.parts[pivot].d < 1) continue;
          ck.require(genusg_bracket_with_pivot(g, parts, Mode::Simplified,
                                               pivot, store) == value);
        }
      }

  // clearing a store and recomputing reproduces identical values
  MemoStore local;
  const Rational first =
      genusg_bracket(2, {{2, 1}, {3, 1}, {1, 0}}, Mode::Simplified, local);
  local.clear();
  ck.require(genusg_bracket(2, {{2, 1}, {3, 1}, {1, 0}}, Mode::Simplified,
                            local) == first);
}

/// Seed-shape polynomials with off-grid hold-out points.
inline void check_seed_polynomials(Checker& ck, MemoStore& store, int gmax) {
  for (int g = 1; g <= gmax; ++g) {
    const MPoly p0 = bracket_polynomial(g, {0}, Mode::Simplified, store);
    ck.require(p0 == MPoly::monomial(1, {2 * g}, Rational(1)));

    MPoly expect(2);
    expect.add_term({2 * g, 0}, Rational(1));
    for (int i = 0; i <= 2 * g - 1; ++i)
      expect.add_term({i, 2 * g - i},
                      Rational(2 * g) / Rational(2 * g + 1) *
                          Rational(binomial(2 * g + 1, 2 * g - i)));
    const MPoly p1 = bracket_polynomial(g, {1, 0}, Mode::Simplified, store);
    ck.require(p1 == expect);

    for (int j = 0; j < 10; ++j) {
      const int x = 2 * g + 2 + j;
      ck.require(p0.eval_int(std::vector<int>{x}) ==
                 genusg_bracket(g, {{x, 0}}, Mode::Simplified, store));
      const int y = 2 * g + 3 + 2 * j;
      ck.require(p1.eval_int(std::vector<int>{x, y}) ==
                 genusg_bracket(g, {{x, 1}, {y, 0}}, Mode::Simplified,
                                store));
    }
  }
}

inline void check_homogeneity(Checker& ck, MemoStore& store, int gmax,
                              int nmax) {
  for (int g = 1; g <= gmax; ++g)
    for (int n = 1; n <= nmax; ++n)
      for (const auto& dvec : compositions(n - 1, n)) {
        const MPoly p = bracket_polynomial(g, dvec, Mode::Simplified, store);
        bool homogeneous = true;
        for (const auto& [e, c] : p.terms())
          if (std::accumulate(e.begin(), e.end(), 0) != 2 * g)
            homogeneous = false;
        ck.require(homogeneous);
      }
}

/// Exact-mode constant term equals -(n-1)!/(d_1!...d_n!).
inline void check_degree0(Checker& ck, MemoStore& store, int gmax, int nmax) {
  for (int g = 1; g <= gmax; ++g)
    for (int n = 1; n <= nmax; ++n)
      for (const auto& dvec : compositions(n - 1, n)) {
        Int dprod = 1;
        for (int d : dvec) dprod *= factorial(d);
        ck.require(degree0_part(g, dvec, store) ==
                   -Rational(factorial(n - 1)) / Rational(dprod));
      }
}

/// Setting the trailing zero-psi multiplicity to zero drops the point.
inline void check_restriction(Checker& ck, MemoStore& store, int gmax,
                              int nmax) {
  for (int g = 1; g <= gmax; ++g)
    for (int n = 1; n <= nmax; ++n) {
      std::vector<int> dvec(n + 1, 0);
      dvec[0] = n;
      const MPoly big = bracket_polynomial(g, dvec, Mode::Simplified, store);
      std::vector<int> dsmall(n, 0);
      dsmall[0] = n - 1;
      const MPoly small =
          bracket_polynomial(g, dsmall, Mode::Simplified, store);
      ck.require(big.coefficient_in_var(n, 0) == small);
    }
}

/// Slices of the tower polynomial agree with the symmetric power on every
/// monomial divisible by all variables (the stripped difference is the whole
/// difference).
inline void check_slice_congruence(Checker& ck, MemoStore& store, int gmax,
                                   int nmax) {
  for (int g = 1; g <= gmax; ++g)
    for (int n = 1; n <= nmax; ++n) {
      std::vector<int> dvec(n + 1, 0);
      dvec[0] = n;
      const MPoly p = bracket_polynomial(g, dvec, Mode::Simplified, store);
      for (int i = -n; i <= 2 * g - n; ++i) {
        const MPoly slice = p.coefficient_in_var(0, i);
        MPoly rhs(n);
        if (i >= 0)
          rhs = pow_of_var_sum(n, 2 * g - i) *
                (Rational(2 * g) * Rational(binomial(2 * g, i)) /
                 Rational(n + i));
        const MPoly diff = slice - rhs;
        ck.require(diff.strip_monomials_divisible_by_all() == diff);
      }
    }
}

/// Merging a zero-psi point of multiplicity b into each psi-carrying point
/// changes the bracket by a polynomial divisible by b^2.
inline void check_pair_merge(Checker& ck, MemoStore& store, int gmax,
                             int nmax) {
  const auto difference = [&](int g, const std::vector<int>& avec,
                              const std::vector<int>& dvec) {
    const int n = static_cast<int>(avec.size());
    return interpolate_grid(1, 2 * g, [&](const std::vector<int>& point) {
      const int b = point[0];
      std::vector<Part> parts(n + 1);
      parts[0] = Part{b, 0};
      for (int i = 0; i < n; ++i) parts[i + 1] = Part{avec[i], dvec[i]};
      Rational value = genusg_bracket(g, parts, Mode::Simplified, store);
      for (int j = 0; j < n; ++j) {
        if (dvec[j] < 1) continue;
        std::vector<Part> merged;
        merged.reserve(n);
        merged.push_back(Part{avec[j] + b, dvec[j] - 1});
        for (int i = 0; i < n; ++i)
          if (i != j) merged.push_back(Part{avec[i], dvec[i]});
        value -= genusg_bracket(g, merged, Mode::Simplified, store);
      }
      return value;
    });
  };

  // worked instance: exactly b^2
  ck.require(difference(1, {1}, {1}) ==
             MPoly::monomial(1, {2}, Rational(1)));

  const std::vector<int> apool{2, 3, 5};
  for (int g = 1; g <= gmax; ++g)
    for (int n = 1; n <= nmax; ++n) {
      const std::vector<int> avec(apool.begin(), apool.begin() + n);
      for (const auto& dvec : compositions(n, n)) {
        const MPoly d = difference(g, avec, dvec);
        ck.require(d.coefficient_of({0}) == 0);
        ck.require(d.coefficient_of({1}) == 0);
      }
    }
}

inline void check_lattice_paths(Checker& ck) {
  ck.require(w0({0, 0, 0}) == 1);
  ck.require(w0({2, 1}) == 3);
  ck.require(w0({1, -1}) == 0);
  ck.require(wI_closed({0, 1}, {1, 1}) == 1);
  ck.require(wI_closed({0}, {2, 0}) == 1);
  ck.require(wI_closed({1}, {2, 0}) == 0);

  for (int m = 1; m <= 4; ++m)
    for (const auto& c : compositions(3, m)) {
      LatticePoint pt(c.begin(), c.end());
      for (int mask = 1; mask < (1 << m); ++mask) {
        std::vector<int> I;
        for (int i = 0; i < m; ++i)
          if (mask & (1 << i)) I.push_back(i);
        ck.require(wI_closed(I, pt) == wI_bruteforce(I, pt));
      }
    }
}

inline void check_coeff_calculus(Checker& ck, int gmax) {
  ck.require(coeff_bracket({2, {{2, 1}, {2, 0}}}) ==
             Rational(4) / Rational(3));
  ck.require(coeff_bracket({2, {{4, 0}}}) == 1);
  ck.require(coeff_bracket({1, {{1, 1}, {2, 0}}}) == 0);

  for (int g = 1; g <= gmax; ++g) {
    // product closed form for one-psi columns
    for (int m = 1; m <= 4; ++m)
      for (const auto& ps : compositions(2 * g, m)) {
        if (ps[m - 1] < 1) continue;
        CoeffKey key{g, {}};
        for (int i = 0; i < m - 1; ++i) key.entries.push_back({ps[i], 1});
        key.entries.push_back({ps[m - 1], 0});
        Rational expect = 1;
        for (int i = 1; i <= m - 1; ++i)
          expect *= Rational(2 * g + i - 1) / Rational(ps[i - 1] + 1);
        ck.require(coeff_bracket(key) == expect);
      }

    // transfer between trailing zero-psi columns
    for (int lead = 1; lead <= 2; ++lead)
      for (const auto& cs : compositions(lead + 1, lead))
        for (int x = 1; x <= 2 * g; ++x)
          for (int y = 1; 2 * g - 1 - x - y >= 0; ++y)
            for (const auto& ps : compositions(2 * g - 1 - x - y, lead)) {
              bool ok = true;
              std::vector<CoeffEntry> left, right;
              for (int i = 0; i < lead; ++i) {
                if (ps[i] + cs[i] < 1) ok = false;
                left.push_back({ps[i], cs[i]});
                right.push_back({ps[i], cs[i]});
              }
              if (!ok) continue;
              left.push_back({x + 1, 0});
              left.push_back({y, 0});
              right.push_back({x, 0});
              right.push_back({y + 1, 0});
              ck.require(coeff_bracket({g, left}) ==
                         coeff_bracket({g, right}));
            }

    // appending a unit column expands as a sum over the columns
    for (int m = 2; m <= 4; ++m)
      for (const auto& cs : compositions(m - 1, m - 1))
        for (const auto& ps : compositions(2 * g - 1, m - 1)) {
          bool ok = true;
          CoeffKey lhs{g, {}};
          for (int i = 0; i < m - 1; ++i) {
            if (ps[i] + cs[i] < 1) ok = false;
            lhs.entries.push_back({ps[i], cs[i]});
          }
          if (!ok) continue;
          lhs.entries.push_back({1, 0});
          Rational rhs = 0;
          for (int i = 0; i < m - 1; ++i) {
            if (cs[i] < 1) continue;
            CoeffKey term{g, {}};
            for (int j = 0; j < m - 1; ++j)
              term.entries.push_back(j == i
                                         ? CoeffEntry{ps[j] + 1, cs[j] - 1}
                                         : CoeffEntry{ps[j], cs[j]});
            rhs += coeff_bracket(term);
          }
          ck.require(coeff_bracket(lhs) == rhs);
        }

    // column merge identity
    for (int m = 3; m <= 4; ++m)
      for (const auto& cs : compositions(m - 1, m - 2))
        for (const auto& ps : compositions(2 * g, m)) {
          if (ps[m - 2] < 1 || ps[m - 1] < 1) continue;
          bool ok = true;
          std::vector<CoeffEntry> entries;
          for (int i = 0; i < m - 2; ++i) {
            if (ps[i] + cs[i] < 1) ok = false;
            entries.push_back({ps[i], cs[i]});
          }
          if (!ok) continue;
          entries.push_back({ps[m - 2], 0});
          entries.push_back({ps[m - 1], 0});
          ck.require(coefreduction_check(g, entries));
        }
  }
}

/// Path-count coefficients equal interpolated-polynomial coefficients on
/// every key with p_i + c_i >= 1.
inline void check_coeff_vs_polynomial(Checker& ck, MemoStore& store, int gmax,
                                      int nmax) {
  for (int g = 1; g <= gmax; ++g)
    for (int n = 1; n <= nmax; ++n)
      for (const auto& dvec : compositions(n - 1, n)) {
        const MPoly poly =
            bracket_polynomial(g, dvec, Mode::Simplified, store);
        for (const auto& expo : compositions(2 * g, n)) {
          bool valid = true;
          CoeffKey key{g, {}};
          for (int i = 0; i < n; ++i) {
            if (expo[i] + dvec[i] < 1) valid = false;
            key.entries.push_back({expo[i], dvec[i]});
          }
          if (!valid) continue;
          std::vector<long long> ps(expo.begin(), expo.end());
          ck.require(coeff_bracket(key) ==
                     poly.coefficient_of(Expo(expo.begin(), expo.end())) /
                         Rational(multinomial(ps)));
        }
      }
}

inline void check_pathways(Checker& ck, MemoStore& store, int gmin, int gmax,
                           int nmax, int threads) {
  const VerificationReport report =
      verify_range(gmin, gmax, nmax, store, threads);
  for (const QueryResult& q : report.queries) ck.require(q.pass);
}

inline void check_independence(Checker& ck, MemoStore& store, int nspecs,
                               int gmax, int nmax) {
  std::mt19937_64 rng(6006);
  std::uniform_int_distribution<int> entry(1, 5);
  for (int g = 1; g <= gmax; ++g)
    for (int n = 1; n <= nmax; ++n)
      for (const auto& dvec : detail::partitions_exact(g + n - 1, n)) {
        const Rational expect = closed_form_extended(g, dvec);
        for (int s = 0; s < nspecs; ++s) {
          ReductionSpec spec;
          spec.avec.resize(n);
          spec.bvec.resize(g);
          for (int& a : spec.avec) a = entry(rng);
          for (int& b : spec.bvec) b = entry(rng);
          ck.require(integral_via_binomial(g, dvec, spec, store,
                                           Mode::Simplified) == expect);
          ck.require(integral_via_binomial(g, dvec, spec, store,
                                           Mode::Exact) == expect);
        }
      }
}

inline void check_string_calculus(Checker& ck, MemoStore& store, int gmax,
                                  int nmax) {
  FaberEngine engine(store);
  ck.require(engine.original(2, {1, 1}) == 3);
  ck.require(engine.original(2, {2, 0}) == 1);
  ck.require(engine.original(2, {1, 1}) + engine.original(2, {2, 0}) == 4);
  ck.require(engine.string_forward(2, {2, 1}) == 4);

  for (int g = 1; g <= gmax; ++g)
    for (int n = 1; n <= nmax; ++n)
      for (const auto& dvec : detail::partitions_exact(g + n - 1, n))
        ck.require(engine.string_forward(g, dvec) ==
                   closed_form_extended(g, dvec));
}

}  // namespace selftest_detail

/// Runs every property suite at the requested scale against a shared store.
/// Per-suite counts stream to `log` as suites finish.
inline SelftestReport run_selftest(SelftestScale scale, MemoStore& store,
                                   std::ostream* log = nullptr,
                                   int threads = 1) {
  using namespace selftest_detail;
  const bool full = scale == SelftestScale::Full;
  const int gmax = full ? 3 : 2;

  SelftestReport report;
  const auto run = [&](const std::string& name,
                       const std::function<void(Checker&)>& suite) {
    Checker ck;
    suite(ck);
    report.suites.push_back({name, ck.checks, ck.failures});
    if (log)
      *log << name << ": " << ck.checks << " checks, " << ck.failures
           << " failures\n";
  };

  run("numbase.combinatorics", [&](Checker& ck) { check_combinatorics(ck); });
  run("mpoly.interpolation",
      [&](Checker& ck) { check_polynomial_infra(ck); });
  run("drbracket.recursion",
      [&](Checker& ck) { check_bracket_recursion(ck, store); });
  run("drbracket.polynomials", [&](Checker& ck) {
    check_seed_polynomials(ck, store, gmax);
    check_homogeneity(ck, store, full ? 3 : 2, 3);
    check_degree0(ck, store, 2, 3);
    check_restriction(ck, store, gmax, full ? 3 : 2);
    check_slice_congruence(ck, store, gmax, full ? 3 : 2);
    check_pair_merge(ck, store, gmax, full ? 3 : 2);
  });
  run("lattice.paths", [&](Checker& ck) { check_lattice_paths(ck); });
  run("lattice.coefficients", [&](Checker& ck) {
    check_coeff_calculus(ck, gmax);
    check_coeff_vs_polynomial(ck, store, gmax, 3);
  });
  run("faber.pathways", [&](Checker& ck) {
    check_pathways(ck, store, 1, full ? 4 : 2, 3, threads);
  });
  run("faber.independence", [&](Checker& ck) {
    check_independence(ck, store, full ? 20 : 5, gmax, full ? 3 : 2);
  });
  run("faber.string", [&](Checker& ck) {
    check_string_calculus(ck, store, gmax, 3);
  });
  return report;
}

}  // namespace drfaber
