#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <drfaber/mpoly.hpp>

using namespace drfaber;

namespace {

// a1^2 + 2 a1 a2 + 2 a2^2
MPoly sample_quadratic() {
  MPoly p(2);
  p.add_term({2, 0}, Rational(1));
  p.add_term({1, 1}, Rational(2));
  p.add_term({0, 2}, Rational(2));
  return p;
}

MPoly random_poly(std::mt19937_64& rng, int nvars, int max_deg, int nterms) {
  std::uniform_int_distribution<int> deg(0, max_deg);
  std::uniform_int_distribution<long long> coef(-9, 9);
  MPoly p(nvars);
  for (int t = 0; t < nterms; ++t) {
    Expo e(nvars);
    for (int i = 0; i < nvars; ++i) e[i] = deg(rng);
    p.add_term(std::move(e), Rational(coef(rng)));
  }
  return p;
}

}  // namespace

TEST_CASE("evaluation") {
  const MPoly p = sample_quadratic();
  CHECK(p.eval_int(std::vector<int>{1, 1}) == 5);
  CHECK(p.eval_int(std::vector<int>{3, 7}) == Rational(9 + 42 + 98));

  const MPoly zero(3);
  CHECK(zero.eval_int(std::vector<int>{4, 5, 6}) == 0);

  const MPoly sq = MPoly::monomial(2, {2, 0}, Rational(1));
  CHECK(sq.eval_int(std::vector<int>{3, 7}) == 9);

  CHECK_THROWS_AS(p.eval_int(std::vector<int>{1}), std::invalid_argument);
}

TEST_CASE("coefficient lookup") {
  const MPoly p = sample_quadratic();
  CHECK(p.coefficient_of({1, 1}) == 2);
  CHECK(p.coefficient_of({2, 0}) == 1);
  CHECK(p.coefficient_of({5, 5}) == 0);
  CHECK_THROWS_AS(p.coefficient_of({1}), std::invalid_argument);
}

TEST_CASE("term accumulation cancels exactly") {
  MPoly p(2);
  p.add_term({1, 1}, Rational(3) / Rational(7));
  p.add_term({1, 1}, Rational(-3) / Rational(7));
  CHECK(p.is_zero());
  p.add_term({0, 0}, Rational(0));
  CHECK(p.is_zero());
}

TEST_CASE("interpolation reproduces polynomials") {
  SECTION("univariate square") {
    const MPoly got = interpolate_grid(1, 2, [](const std::vector<int>& x) {
      return Rational(x[0]) * Rational(x[0]);
    });
    CHECK(got == MPoly::monomial(1, {2}, Rational(1)));
  }
  SECTION("constant with degree bound zero") {
    const MPoly got = interpolate_grid(
        1, 0, [](const std::vector<int>&) { return Rational(7); });
    CHECK(got == MPoly::constant(1, Rational(7)));
  }
  SECTION("bivariate quadratic") {
    const MPoly p = sample_quadratic();
    const MPoly got = interpolate_grid(2, 2, [&](const std::vector<int>& x) {
      return p.eval_int(x);
    });
    CHECK(got == p);
  }
}

TEST_CASE("interpolation hold-out property") {
  std::mt19937_64 rng(424242);
  for (int trial = 0; trial < 12; ++trial) {
    const int nvars = 1 + static_cast<int>(rng() % 3);
    const int bound = 1 + static_cast<int>(rng() % 3);
    const MPoly p = random_poly(rng, nvars, bound, 6);
    const MPoly got = interpolate_grid(
        nvars, bound,
        [&](const std::vector<int>& x) { return p.eval_int(x); });
    CHECK(got == p);
    // 10 off-grid integer points
    std::uniform_int_distribution<int> off(bound + 2, bound + 40);
    for (int j = 0; j < 10; ++j) {
      std::vector<int> x(nvars);
      for (int i = 0; i < nvars; ++i) x[i] = off(rng);
      CHECK(got.eval_int(x) == p.eval_int(x));
    }
  }
}

TEST_CASE("eval agrees with term-by-term expansion") {
  std::mt19937_64 rng(777);
  std::uniform_int_distribution<long long> coord(-5, 5);
  for (int trial = 0; trial < 40; ++trial) {
    const int nvars = 1 + static_cast<int>(rng() % 3);
    const MPoly p = random_poly(rng, nvars, 4, 8);
    std::vector<Rational> x(nvars);
    for (auto& xi : x) xi = Rational(coord(rng));
    Rational expanded = 0;
    for (const auto& [e, c] : p.terms()) {
      Rational term = c;
      for (int i = 0; i < nvars; ++i)
        for (int k = 0; k < e[i]; ++k) term *= x[i];
      expanded += term;
    }
    CHECK(p.eval(x) == expanded);
  }
}

TEST_CASE("strip of fully divisible monomials") {
  MPoly p(2);
  p.add_term({1, 1}, Rational(1));
  p.add_term({2, 0}, Rational(1));
  MPoly expect(2);
  expect.add_term({2, 0}, Rational(1));
  CHECK(p.strip_monomials_divisible_by_all() == expect);

  const MPoly q = MPoly::monomial(2, {2, 0}, Rational(1));
  CHECK(q.strip_monomials_divisible_by_all() == q);

  const MPoly r = MPoly::monomial(3, {1, 1, 1}, Rational(3));
  CHECK(r.strip_monomials_divisible_by_all().is_zero());

  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const MPoly s = random_poly(rng, 3, 3, 8);
    const MPoly once = s.strip_monomials_divisible_by_all();
    CHECK(once.strip_monomials_divisible_by_all() == once);  // idempotent
  }
}

TEST_CASE("coefficient_in_var slices") {
  const MPoly p = sample_quadratic();
  MPoly at1(1);  // coefficient of a1^1: 2 a2
  at1.add_term({1}, Rational(2));
  CHECK(p.coefficient_in_var(0, 1) == at1);
  MPoly at0(1);  // coefficient of a1^0: 2 a2^2
  at0.add_term({2}, Rational(2));
  CHECK(p.coefficient_in_var(0, 0) == at0);
  CHECK(p.coefficient_in_var(0, -1).is_zero());
  CHECK(p.coefficient_in_var(0, 3).is_zero());
}

TEST_CASE("power of variable sum") {
  const MPoly direct = pow_of_var_sum(3, 3);
  MPoly lin(3);
  lin.add_term({1, 0, 0}, Rational(1));
  lin.add_term({0, 1, 0}, Rational(1));
  lin.add_term({0, 0, 1}, Rational(1));
  CHECK(direct == lin * lin * lin);
  CHECK(pow_of_var_sum(2, 0) == MPoly::constant(2, Rational(1)));
}

TEST_CASE("text format") {
  CHECK(poly_text(MPoly(2)) == "0");
  CHECK(poly_text(sample_quadratic()) ==
        "1*a1^2 + 2*a1^1*a2^1 + 2*a2^2");

  MPoly p = sample_quadratic();
  p.add_term({0, 0}, Rational(-1));
  CHECK(poly_text(p) == "1*a1^2 + 2*a1^1*a2^1 + 2*a2^2 + -1");

  MPoly mixed(2);  // graded order: a1^3 before a2^1 before constant
  mixed.add_term({0, 1}, Rational(1));
  mixed.add_term({3, 0}, Rational(1));
  mixed.add_term({0, 0}, Rational(1) / Rational(2));
  CHECK(poly_text(mixed) == "1*a1^3 + 1*a2^1 + 1/2");
}
