#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace drfaber {

// Every value in this library is exact: arbitrary-precision integers and
// rationals backed by GMP. Rationals are always canonical (lowest terms,
// positive denominator). Division by zero throws std::overflow_error.
using Int = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                          boost::multiprecision::et_off>;
using Rational =
    boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                  boost::multiprecision::et_off>;

inline Int factorial(long long k) {
  if (k < 0) throw std::invalid_argument("factorial: negative argument");
  Int r = 1;
  for (long long i = 2; i <= k; ++i) r *= i;
  return r;
}

/// (2d-1)!! = 1*3*...*(2d-1), with the convention (-1)!! = 1 for d = 0.
inline Int double_factorial_odd(long long d) {
  if (d < 0)
    throw std::invalid_argument("double_factorial_odd: negative argument");
  Int r = 1;
  for (long long j = 1; j <= d; ++j) r *= 2 * j - 1;
  return r;
}

/// (sum parts)! / prod parts_i!
inline Int multinomial(const std::vector<long long>& parts) {
  long long total = 0;
  for (long long p : parts) {
    if (p < 0) throw std::invalid_argument("multinomial: negative part");
    total += p;
  }
  Int r = factorial(total);
  for (long long p : parts) r /= factorial(p);
  return r;
}

/// Binomial coefficient; zero outside 0 <= k <= n.
inline Int binomial(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  return multinomial({k, n - k});
}

inline Int int_pow(long long base, unsigned e) {
  return boost::multiprecision::pow(Int(base), e);
}

/// Serialized form: "p/q" in lowest terms, or just "p" when q = 1.
inline std::string rat_str(const Rational& r) { return r.str(); }

/// Strict inverse of rat_str; also accepts non-canonical "p/q" input and
/// normalizes it. Malformed strings raise std::invalid_argument.
inline Rational rat_parse(std::string_view s) {
  const auto bad = [&] {
    return std::invalid_argument("rat_parse: malformed rational '" +
                                 std::string(s) + "'");
  };
  if (s.empty()) throw bad();
  try {
    const auto slash = s.find('/');
    if (slash == std::string_view::npos) return Rational(Int(std::string(s)));
    const Int num{std::string(s.substr(0, slash))};
    const Int den{std::string(s.substr(slash + 1))};
    if (den == 0) throw bad();
    return Rational(num) / Rational(den);  // canonicalizes
  } catch (const std::runtime_error&) {
    throw bad();
  }
}

}  // namespace drfaber
