#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mpoly.hpp"
#include "numbase.hpp"

namespace drfaber {

// A bracket <prod_i [a_i; d_i]>_g is the integral of lambda_g lambda_{g-1}
// psi_0^0 prod_i psi_i^{d_i} over the double ramification cycle with zero
// multiplicities a_i. It vanishes unless sum d_i = n - 1, and it is computed
// by eliminating psi powers one at a time: eliminating one psi at a point
// splits the bracket into genus-0 and genus-g factors over all two-block
// ordered partitions of the remaining points. One-part brackets <[a;0]> are
// the seeds (see Mode). All values are in C_g = 1 units.

/// One column [a; d]: marked point of multiplicity a carrying psi^d.
struct Part {
  int a = 1;  // multiplicity, >= 1
  int d = 0;  // psi power, >= 0
  friend bool operator==(const Part&, const Part&) = default;
};

/// Seed convention for <[a;0]>_g: a^{2g} (Simplified) or a^{2g} - 1 (Exact).
/// The two differ by a constant that cancels in every assembled integral;
/// Simplified keeps the bracket homogeneous.
enum class Mode : std::uint8_t { Simplified, Exact };

inline char mode_tag(Mode m) { return m == Mode::Simplified ? 'S' : 'E'; }

/// Canonical memo key: parts sorted descending by (a, d), so equal multisets
/// collide. Permutation symmetry of the bracket is structural.
struct BracketKey {
  int g = 1;
  std::vector<Part> parts;
  Mode mode = Mode::Simplified;

  void canonicalize() {
    std::sort(parts.begin(), parts.end(), [](const Part& x, const Part& y) {
      return std::pair(x.a, x.d) > std::pair(y.a, y.d);
    });
  }
  friend bool operator==(const BracketKey&, const BracketKey&) = default;
};

struct BracketKeyHash {
  std::size_t operator()(const BracketKey& k) const {
    std::uint64_t h = 1469598103934665603ULL;
    const auto mix = [&h](std::uint64_t v) {
      h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    };
    mix(static_cast<std::uint64_t>(k.g));
    mix(static_cast<std::uint64_t>(k.mode));
    for (const Part& p : k.parts)
      mix((static_cast<std::uint64_t>(p.a) << 20) ^
          static_cast<std::uint64_t>(p.d));
    return static_cast<std::size_t>(h);
  }
};

/// Memoized bracket values, shared across queries. Thread-safe: get/insert
/// take a mutex, concurrent evaluators may race on a key but the first
/// insert wins and later ones are discarded (values are deterministic).
/// A key, once bound, is never rebound.
class MemoStore {
 public:
  struct Stats {
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::uint64_t computes = 0;  // insert calls, i.e. evaluated recursions
  };

  std::optional<Rational> lookup(const BracketKey& key) const {
    std::lock_guard lock(mu_);
    const auto it = map_.find(key);
    if (it == map_.end()) {
      ++stats_.misses;
      return std::nullopt;
    }
    ++stats_.hits;
    return it->second;
  }

  Rational insert(BracketKey key, Rational value) {
    std::lock_guard lock(mu_);
    ++stats_.computes;
    const auto [it, fresh] = map_.try_emplace(std::move(key), std::move(value));
    return it->second;  // first insert wins
  }

  void clear() {
    std::lock_guard lock(mu_);
    map_.clear();
    stats_ = Stats{};
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return map_.size();
  }

  Stats stats() const {
    std::lock_guard lock(mu_);
    return stats_;
  }

  // Cache file format, line oriented, one entry per line:
  //   v1<TAB>g=<int><TAB>mode=<S|E><TAB>parts=<a>:<d>,...<TAB>value=<p/q>
  // Lines with an unknown version tag are rejected (skipped and counted);
  // malformed v1 lines are an error.

  void save(const std::string& path) const {
    std::vector<std::pair<BracketKey, Rational>> entries;
    {
      std::lock_guard lock(mu_);
      entries.assign(map_.begin(), map_.end());
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& x, const auto& y) {
                const BracketKey& a = x.first;
                const BracketKey& b = y.first;
                if (a.g != b.g) return a.g < b.g;
                if (a.mode != b.mode) return a.mode < b.mode;
                return std::lexicographical_compare(
                    a.parts.begin(), a.parts.end(), b.parts.begin(),
                    b.parts.end(), [](const Part& p, const Part& q) {
                      return std::pair(p.a, p.d) < std::pair(q.a, q.d);
                    });
              });
    std::ofstream out(path, std::ios::trunc);
    if (!out)
      throw std::runtime_error("cache: cannot write '" + path + "'");
    for (const auto& [key, value] : entries) {
      out << "v1\tg=" << key.g << "\tmode=" << mode_tag(key.mode)
          << "\tparts=";
      for (std::size_t i = 0; i < key.parts.size(); ++i) {
        if (i) out << ',';
        out << key.parts[i].a << ':' << key.parts[i].d;
      }
      out << "\tvalue=" << rat_str(value) << '\n';
    }
    if (!out.good())
      throw std::runtime_error("cache: write failed for '" + path + "'");
  }

  struct LoadResult {
    std::size_t loaded = 0;
    std::size_t skipped_unknown_version = 0;
  };

  LoadResult load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cache: cannot read '" + path + "'");
    LoadResult result;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::vector<std::string> fields;
      std::size_t start = 0;
      while (true) {
        const std::size_t tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
      }
      if (fields[0] != "v1") {
        ++result.skipped_unknown_version;
        continue;
      }
      const auto fail = [&](const std::string& why) {
        return std::runtime_error("cache: " + path + ":" +
                                  std::to_string(lineno) + ": " + why);
      };
      if (fields.size() != 5) throw fail("expected 5 fields");
      const auto field = [&](std::size_t i, const std::string& prefix) {
        if (fields[i].rfind(prefix, 0) != 0)
          throw fail("expected '" + prefix + "...'");
        return fields[i].substr(prefix.size());
      };
      BracketKey key;
      try {
        key.g = std::stoi(field(1, "g="));
      } catch (const std::exception&) {
        throw fail("bad genus");
      }
      const std::string mode = field(2, "mode=");
      if (mode == "S")
        key.mode = Mode::Simplified;
      else if (mode == "E")
        key.mode = Mode::Exact;
      else
        throw fail("bad mode");
      std::istringstream ps(field(3, "parts="));
      std::string chunk;
      while (std::getline(ps, chunk, ',')) {
        const auto colon = chunk.find(':');
        if (colon == std::string::npos) throw fail("bad part");
        try {
          key.parts.push_back(Part{std::stoi(chunk.substr(0, colon)),
                                   std::stoi(chunk.substr(colon + 1))});
        } catch (const std::exception&) {
          throw fail("bad part");
        }
        if (key.parts.back().a < 1 || key.parts.back().d < 0)
          throw fail("bad part");
      }
      if (key.parts.empty()) throw fail("empty parts");
      Rational value;
      try {
        value = rat_parse(field(4, "value="));
      } catch (const std::invalid_argument&) {
        throw fail("bad value");
      }
      key.canonicalize();
      std::lock_guard lock(mu_);
      map_.try_emplace(std::move(key), std::move(value));
      ++result.loaded;
    }
    return result;
  }

 private:
  mutable std::mutex mu_;
  std::unordered_map<BracketKey, Rational, BracketKeyHash> map_;
  mutable Stats stats_;
};

// Supported input window. Factorials of psi powers ride in 64-bit scalars
// inside the recursion and multiplicities merge by summation into int parts,
// so both get hard caps instead of silent wraparound.
inline constexpr long long kMaxTotalPsi = 20;
inline constexpr int kMaxMultiplicity = 10'000'000;

namespace detail {

inline void check_part_ranges(std::span<const Part> parts) {
  long long dsum = 0;
  for (const Part& p : parts) {
    if (p.a < 1)
      throw std::invalid_argument("bracket: multiplicity must be positive");
    if (p.a > kMaxMultiplicity)
      throw std::invalid_argument(
          "bracket: multiplicity exceeds the supported range");
    if (p.d < 0)
      throw std::invalid_argument("bracket: psi power must be nonnegative");
    dsum += p.d;
  }
  if (dsum > kMaxTotalPsi)
    throw std::invalid_argument(
        "bracket: total psi power exceeds the supported range");
}

}  // namespace detail

/// Genus-0 bracket: (n-2)!/(d_1!...d_n!) when n >= 2 and sum d_i = n - 2,
/// zero in every other case (including n = 1, where the dimension count
/// cannot balance). The zero branch is meaningful inside the recursion.
inline Rational genus0_bracket(std::span<const Part> parts) {
  detail::check_part_ranges(parts);
  long long dsum = 0, dfact = 1;
  for (const Part& p : parts) {
    dsum += p.d;
    long long f = 1;
    for (int j = 2; j <= p.d; ++j) f *= j;
    dfact *= f;
  }
  const long long n = static_cast<long long>(parts.size());
  if (n < 2 || dsum != n - 2) return Rational(0);
  return Rational(factorial(n - 2)) / Rational(dfact);
}

namespace detail {

inline long long fact64(long long k) {
  long long f = 1;
  for (long long j = 2; j <= k; ++j) f *= j;
  return f;
}

inline Rational eval_bracket(int g, std::vector<Part> parts, Mode mode,
                             MemoStore& store);

// Eliminates one psi power at parts[pivot] (which must have d >= 1) and sums
// the four product terms over all ordered two-block partitions of the other
// parts. Dimension-infeasible genus-0 factors are pruned by integer checks
// before any genus-g factor is evaluated.
inline Rational expand_pivot(int g, const std::vector<Part>& parts,
                             std::size_t pivot, Mode mode, MemoStore& store) {
  const int a = parts[pivot].a;
  const int d = parts[pivot].d - 1;
  std::vector<Part> rest;
  rest.reserve(parts.size() - 1);
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (i != pivot) rest.push_back(parts[i]);
  const int n = static_cast<int>(rest.size());

  long long total_d = 0, total_dfact = 1;
  for (const Part& p : rest) {
    total_d += p.d;
    total_dfact *= fact64(p.d);
  }
  const long long dfact_piv = fact64(d);

  // subset scalars, extended from mask minus its lowest bit
  const std::size_t nsub = std::size_t{1} << n;
  std::vector<long long> sum_a(nsub, 0), sum_d(nsub, 0), dfact(nsub, 1);
  std::vector<int> cnt(nsub, 0);
  for (std::size_t m = 1; m < nsub; ++m) {
    const int j = std::countr_zero(m);
    const std::size_t pm = m & (m - 1);
    sum_a[m] = sum_a[pm] + rest[j].a;
    sum_d[m] = sum_d[pm] + rest[j].d;
    dfact[m] = dfact[pm] * fact64(rest[j].d);
    cnt[m] = cnt[pm] + 1;
  }

  const auto subset_parts = [&](std::size_t mask, int extra_capacity) {
    std::vector<Part> v;
    v.reserve(static_cast<std::size_t>(cnt[mask]) + extra_capacity);
    for (std::size_t m = mask; m; m &= m - 1)
      v.push_back(rest[std::countr_zero(m)]);
    return v;
  };

  Rational acc = 0;
  for (std::size_t J = 0; J < nsub; ++J) {
    const std::size_t I = (nsub - 1) ^ J;
    const int szJ = cnt[J];
    const int szI = n - szJ;
    const long long sJ = sum_a[J];
    const long long aJ = a + sJ;
    const long long dJ = sum_d[J];
    const long long dI = total_d - dJ;
    const long long fJ = dfact[J];
    const long long fI = total_dfact / dfact[J];

    // 1: (a+s_J)|I| <[a+s_J;0] I>_0 <[a;d] J>_g
    if (szI >= 1 && dI == szI - 1) {
      std::vector<Part> sub = subset_parts(J, 1);
      sub.push_back(Part{a, d});
      acc += Rational(aJ * szI) * Rational(fact64(szI - 1)) / Rational(fI) *
             eval_bracket(g, std::move(sub), mode, store);
    }
    // 2: -s_J (2g+|J|-1) <[a;d][s_J;0] I>_0 <J>_g
    if (szJ >= 1 && d + dI == szI) {
      acc -= Rational(sJ * (2 * g + szJ - 1)) * Rational(fact64(szI)) /
             Rational(dfact_piv * fI) *
             eval_bracket(g, subset_parts(J, 0), mode, store);
    }
    // 3: (a+s_J)(2g+|I|) <[a+s_J;0] I>_g <[a;d] J>_0
    if (d + dJ == szJ - 1) {
      std::vector<Part> sub = subset_parts(I, 1);
      sub.push_back(Part{static_cast<int>(aJ), 0});
      acc += Rational(aJ * (2 * g + szI)) * Rational(fact64(szJ - 1)) /
             Rational(dfact_piv * fJ) *
             eval_bracket(g, std::move(sub), mode, store);
    }
    // 4: -s_J (|J|-1) <[a;d][s_J;0] I>_g <J>_0
    if (szJ >= 2 && dJ == szJ - 2) {
      std::vector<Part> sub = subset_parts(I, 2);
      sub.push_back(Part{a, d});
      sub.push_back(Part{static_cast<int>(sJ), 0});
      acc -= Rational(sJ * (szJ - 1)) * Rational(fact64(szJ - 2)) /
             Rational(fJ) * eval_bracket(g, std::move(sub), mode, store);
    }
  }
  return acc / Rational(static_cast<long long>(a) * (2 * g + n));
}

// Internal entry point: dimension mismatches contribute exactly zero here
// (degree counting kills the integral); only the public API rejects them.
inline Rational eval_bracket(int g, std::vector<Part> parts, Mode mode,
                             MemoStore& store) {
  long long dsum = 0;
  for (const Part& p : parts) dsum += p.d;
  if (dsum != static_cast<long long>(parts.size()) - 1) return Rational(0);

  BracketKey key{g, std::move(parts), mode};
  key.canonicalize();
  if (auto hit = store.lookup(key)) return *hit;

  Rational value;
  if (key.parts.size() == 1) {
    // seed <[a;0]>
    const Int power = int_pow(key.parts[0].a, 2 * g);
    value = mode == Mode::Simplified ? Rational(power) : Rational(power - 1);
  } else {
    // pivot: maximal d, ties broken by larger a, then canonical position
    std::size_t pivot = 0;
    for (std::size_t i = 1; i < key.parts.size(); ++i) {
      const Part& p = key.parts[i];
      const Part& best = key.parts[pivot];
      if (p.d > best.d || (p.d == best.d && p.a > best.a)) pivot = i;
    }
    value = expand_pivot(g, key.parts, pivot, mode, store);
  }
  return store.insert(std::move(key), std::move(value));
}

inline void validate_bracket_args(int g, const std::vector<Part>& parts) {
  if (g < 1) throw std::invalid_argument("bracket: genus must be >= 1");
  if (parts.empty())
    throw std::invalid_argument("bracket: needs at least one part");
  check_part_ranges(parts);
  long long dsum = 0;
  for (const Part& p : parts) dsum += p.d;
  if (dsum != static_cast<long long>(parts.size()) - 1)
    throw std::invalid_argument("dimension: sum of psi-powers must be n-1");
}

}  // namespace detail

/// <prod [a_i;d_i]>_g by psi elimination, memoized in the store.
inline Rational genusg_bracket(int g, std::vector<Part> parts, Mode mode,
                               MemoStore& store) {
  detail::validate_bracket_args(g, parts);
  return detail::eval_bracket(g, std::move(parts), mode, store);
}

/// Same value with the pivot forced to a chosen part (index into canonical
/// order; that part must carry d >= 1). The top-level result bypasses the
/// memo so different pivots are genuinely recomputed.
inline Rational genusg_bracket_with_pivot(int g, std::vector<Part> parts,
                                          Mode mode, std::size_t pivot,
                                          MemoStore& store) {
  detail::validate_bracket_args(g, parts);
  BracketKey key{g, std::move(parts), mode};
  key.canonicalize();
  if (pivot >= key.parts.size() || key.parts[pivot].d < 1)
    throw std::invalid_argument("bracket: pivot must carry a psi power");
  return detail::expand_pivot(g, key.parts, pivot, mode, store);
}

/// The bracket as a polynomial in the multiplicities: interpolates
/// <[x_1;d_1]...[x_n;d_n]>_g on the grid {1,...,2g+1}^n (per-variable degree
/// bound 2g). Simplified mode gives a homogeneous polynomial of total degree
/// 2g; Exact mode adds a constant term.
inline MPoly bracket_polynomial(int g, const std::vector<int>& dvec, Mode mode,
                                MemoStore& store) {
  if (g < 1) throw std::invalid_argument("bracket: genus must be >= 1");
  const int n = static_cast<int>(dvec.size());
  if (n < 1) throw std::invalid_argument("bracket: needs at least one part");
  long long dsum = 0;
  for (int d : dvec) {
    if (d < 0)
      throw std::invalid_argument("bracket: psi power must be nonnegative");
    dsum += d;
  }
  if (dsum > kMaxTotalPsi)
    throw std::invalid_argument(
        "bracket: total psi power exceeds the supported range");
  if (dsum != n - 1)
    throw std::invalid_argument("dimension: sum of psi-powers must be n-1");
  return interpolate_grid(n, 2 * g, [&](const std::vector<int>& point) {
    std::vector<Part> parts(n);
    for (int i = 0; i < n; ++i) parts[i] = Part{point[i], dvec[i]};
    return detail::eval_bracket(g, std::move(parts), mode, store);
  });
}

/// Constant term of the Exact-mode bracket polynomial. Equals
/// -(n-1)!/(d_1!...d_n!) in C_g = 1 units.
inline Rational degree0_part(int g, const std::vector<int>& dvec,
                             MemoStore& store) {
  const MPoly p = bracket_polynomial(g, dvec, Mode::Exact, store);
  return p.coefficient_of(Expo(dvec.size(), 0));
}

}  // namespace drfaber
