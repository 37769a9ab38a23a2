#pragma once

#include <atomic>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "drbracket.hpp"
#include "lattice.hpp"
#include "numbase.hpp"

namespace drfaber {

// Assembles brackets into integrals of lambda_g lambda_{g-1} psi_0^0
// prod psi_i^{d_i} over the moduli space, along three independent pathways:
//   binomial  - block-partition reduction to DR brackets (the recursion side)
//   coeff     - the coefficient-bracket sum evaluated by lattice paths
//   closed    - the closed-form product of factorials and double factorials
// All values are exact rationals in C_g = 1 units.

/// Auxiliary multiplicities for the block-partition reduction: avec at the n
/// marked points, bvec at the g extra points. Any positive entries give the
/// same integral; that independence is itself a tested property.
struct ReductionSpec {
  std::vector<int> avec;
  std::vector<int> bvec;

  static ReductionSpec ones(int n, int g) {
    return ReductionSpec{std::vector<int>(n, 1), std::vector<int>(g, 1)};
  }
};

namespace detail {

inline void validate_extended(int g, const std::vector<int>& dvec) {
  if (g < 1) throw std::invalid_argument("integral: genus must be >= 1");
  if (dvec.empty())
    throw std::invalid_argument("integral: needs at least one psi power");
  long long sum = 0;
  for (int d : dvec) {
    if (d < 1)
      throw std::invalid_argument("integral: psi powers must be positive");
    sum += d;
  }
  if (sum > kMaxTotalPsi)
    throw std::invalid_argument(
        "integral: total psi power exceeds the supported range");
  if (sum != g + static_cast<long long>(dvec.size()) - 1)
    throw std::invalid_argument(
        "dimension: sum of psi-powers must be g+n-1");
}

}  // namespace detail

/// Extended-form integral by the block-partition identity: distributes the g
/// extra points over blocks I_0,...,I_n ((n+1)^g assignments), evaluates each
/// resulting bracket, and divides by g! prod b_i^2. Assignments pushing any
/// psi power negative are skipped.
inline Rational integral_via_binomial(int g, const std::vector<int>& dvec,
                                      const ReductionSpec& spec,
                                      MemoStore& store,
                                      Mode mode = Mode::Simplified) {
  detail::validate_extended(g, dvec);
  const int n = static_cast<int>(dvec.size());
  if (static_cast<int>(spec.avec.size()) != n ||
      static_cast<int>(spec.bvec.size()) != g)
    throw std::invalid_argument("integral: reduction spec sizes must be n, g");
  long long mass = 0;  // multiplicities merge by summation inside brackets
  for (int a : spec.avec) {
    if (a < 1) throw std::invalid_argument("integral: spec entries must be >= 1");
    mass += a;
  }
  for (int b : spec.bvec) {
    if (b < 1) throw std::invalid_argument("integral: spec entries must be >= 1");
    mass += b;
  }
  if (mass > kMaxMultiplicity)
    throw std::invalid_argument(
        "integral: total spec multiplicity exceeds the supported range");

  Int denom = factorial(g);
  for (int b : spec.bvec) denom *= static_cast<long long>(b) * b;

  Rational acc = 0;
  std::vector<int> assign(g, 0);  // block of each extra point, 0..n
  while (true) {
    std::vector<int> count(n + 1, 0);
    for (int j = 0; j < g; ++j) ++count[assign[j]];
    bool feasible = true;
    for (int i = 1; i <= n; ++i)
      if (count[i] > dvec[i - 1]) feasible = false;
    if (feasible) {
      std::vector<Part> parts;
      parts.reserve(n + count[0]);
      std::vector<int> extra(n + 1, 0);
      for (int j = 0; j < g; ++j)
        if (assign[j] != 0) extra[assign[j]] += spec.bvec[j];
      for (int i = 1; i <= n; ++i)
        parts.push_back(
            Part{spec.avec[i - 1] + extra[i], dvec[i - 1] - count[i]});
      for (int j = 0; j < g; ++j)
        if (assign[j] == 0) parts.push_back(Part{spec.bvec[j], 0});
      const Rational term =
          detail::eval_bracket(g, std::move(parts), mode, store);
      if ((g - count[0]) % 2 == 0)
        acc += term;
      else
        acc -= term;
    }
    int j = 0;
    while (j < g && assign[j] == n) assign[j++] = 0;
    if (j == g) break;
    ++assign[j];
  }
  return acc / Rational(denom);
}

/// Extended-form integral through coefficient brackets:
///   (2g)!/(g! 2^g) sum over i_0+...+i_n = g, i_j <= d_j of
///   (-1)^{g-i_0} g!/(i_0!...i_n!) <prod_j |2i_j; d_j-i_j| prod^{i_0} |2;0|>.
inline Rational integral_via_coeff(int g, const std::vector<int>& dvec) {
  detail::validate_extended(g, dvec);
  const int n = static_cast<int>(dvec.size());
  Rational sum = 0;
  std::vector<int> iv(n, 0);  // i_1..i_n; i_0 is the remainder
  while (true) {
    long long used = 0;
    for (int j = 0; j < n; ++j) used += iv[j];
    if (used <= g) {
      const long long i0 = g - used;
      CoeffKey key{g, {}};
      key.entries.reserve(n + i0);
      for (int j = 0; j < n; ++j)
        key.entries.push_back({2LL * iv[j], dvec[j] - iv[j]});
      for (long long j = 0; j < i0; ++j) key.entries.push_back({2, 0});
      Int weight = factorial(g) / factorial(i0);
      for (int j = 0; j < n; ++j) weight /= factorial(iv[j]);
      const Rational term = Rational(weight) * coeff_bracket(key);
      if ((g - i0) % 2 == 0)
        sum += term;
      else
        sum -= term;
    }
    int j = 0;
    while (j < n && iv[j] == dvec[j]) iv[j++] = 0;
    if (j == n) break;
    ++iv[j];
  }
  return sum * Rational(factorial(2 * g)) /
         Rational(factorial(g) * int_pow(2, g));
}

/// One-point base value g!/2^{g-1}: the extended integral with a single
/// psi^g point, in C_g = 1 units.
inline Rational one_point_base(int g) {
  if (g < 1) throw std::invalid_argument("integral: genus must be >= 1");
  return Rational(factorial(g)) / Rational(int_pow(2, g - 1));
}

/// Extended-form prefactor (2g-2+n)!(2g-1)!! / ((2g-1)! prod (2d_i-1)!!),
/// as raw arithmetic in g and the psi powers (no dimension constraint).
inline Rational extended_form_ratio(int g, const std::vector<int>& dvec) {
  if (g < 1) throw std::invalid_argument("integral: genus must be >= 1");
  const int n = static_cast<int>(dvec.size());
  if (n < 1) throw std::invalid_argument("integral: needs at least one point");
  Int num = factorial(2 * g - 2 + n) * double_factorial_odd(g);
  Int den = factorial(2 * g - 1);
  for (int d : dvec) den *= double_factorial_odd(d);
  return Rational(num) / Rational(den);
}

/// Closed form for the extended integral: the prefactor times the one-point
/// base, on dimension-correct queries only.
inline Rational closed_form_extended(int g, const std::vector<int>& dvec) {
  detail::validate_extended(g, dvec);
  return extended_form_ratio(g, dvec) * one_point_base(g);
}

/// Original-form prefactor (2g-3+n)!(2g-3)!! / ((2g-2)! prod (2d_i-1)!!);
/// the original integral is this times the one-point original value.
inline Rational original_form_ratio(int g, const std::vector<int>& dvec) {
  if (g < 1) throw std::invalid_argument("integral: genus must be >= 1");
  const int n = static_cast<int>(dvec.size());
  if (n < 1) throw std::invalid_argument("integral: needs at least one point");
  Int num = factorial(2 * g - 3 + n) * double_factorial_odd(g - 1);
  Int den = factorial(2 * g - 2);
  for (int d : dvec) den *= double_factorial_odd(d);
  return Rational(num) / Rational(den);
}

/// String calculus over a chosen extended-form pipeline. Extended values G
/// (with the psi^0 point) and original values F (without it) are related by
///   G(d) = sum_j F(d - e_j);
/// F is recovered by inverting this relation, recursing on the leading entry
/// and eliminating zero entries by re-applying the same rule at the
/// zero-carrying point. Values are cached per engine.
class FaberEngine {
 public:
  enum class Pipeline { Binomial, Coeff, Closed };

  explicit FaberEngine(MemoStore& store,
                       Pipeline pipeline = Pipeline::Binomial,
                       Mode mode = Mode::Simplified)
      : store_(store), pipeline_(pipeline), mode_(mode) {}

  /// G: extended-form integral, sum d = g+n-1, all d_i >= 1.
  Rational extended(int g, std::vector<int> dvec) {
    detail::validate_extended(g, dvec);
    std::sort(dvec.begin(), dvec.end(), std::greater<>());
    const auto key = std::pair(g, dvec);
    if (const auto it = gcache_.find(key); it != gcache_.end())
      return it->second;
    Rational value;
    switch (pipeline_) {
      case Pipeline::Binomial:
        value = integral_via_binomial(
            g, dvec, ReductionSpec::ones(static_cast<int>(dvec.size()), g),
            store_, mode_);
        break;
      case Pipeline::Coeff:
        value = integral_via_coeff(g, dvec);
        break;
      case Pipeline::Closed:
        value = closed_form_extended(g, dvec);
        break;
    }
    gcache_.emplace(key, value);
    return value;
  }

  /// F: original-form integral, sum d = g+n-2, d_i >= 0 (zero entries are
  /// removed through the string rule).
  Rational original(int g, std::vector<int> dvec) {
    if (g < 1) throw std::invalid_argument("integral: genus must be >= 1");
    const int n = static_cast<int>(dvec.size());
    if (n < 1)
      throw std::invalid_argument("integral: needs at least one point");
    long long sum = 0;
    for (int d : dvec) {
      if (d < 0)
        throw std::invalid_argument("integral: psi powers must be >= 0");
      sum += d;
    }
    if (sum != g + static_cast<long long>(n) - 2)
      throw std::invalid_argument(
          "dimension: sum of psi-powers must be g+n-2");

    std::sort(dvec.begin(), dvec.end(), std::greater<>());
    const auto key = std::pair(g, dvec);
    if (const auto it = fcache_.find(key); it != fcache_.end())
      return it->second;

    Rational value;
    if (n == 1) {
      value = extended(g, {g});  // single-point base case
    } else if (dvec.back() == 0) {
      // forget the zero-carrying point
      std::vector<int> rest(dvec.begin(), dvec.end() - 1);
      value = 0;
      for (int j = 0; j < n - 1; ++j) {
        if (rest[j] < 1) continue;
        std::vector<int> next = rest;
        --next[j];
        value += original(g, next);
      }
    } else {
      // G(d + e_1) = F(d) + sum_{j >= 2} F(d + e_1 - e_j)
      std::vector<int> up = dvec;
      ++up[0];
      value = extended(g, up);
      for (int j = 1; j < n; ++j) {
        std::vector<int> next = up;
        --next[j];
        value -= original(g, next);
      }
    }
    fcache_.emplace(key, value);
    return value;
  }

  /// G recomputed forward from original-form values: sum_j F(d - e_j).
  Rational string_forward(int g, const std::vector<int>& dvec) {
    if (g < 1) throw std::invalid_argument("integral: genus must be >= 1");
    const int n = static_cast<int>(dvec.size());
    if (n < 1)
      throw std::invalid_argument("integral: needs at least one point");
    long long sum = 0;
    for (int d : dvec) {
      if (d < 0)
        throw std::invalid_argument("integral: psi powers must be >= 0");
      sum += d;
    }
    if (sum != g + static_cast<long long>(n) - 1)
      throw std::invalid_argument(
          "dimension: sum of psi-powers must be g+n-1");
    Rational value = 0;
    for (int j = 0; j < n; ++j) {
      if (dvec[j] < 1) continue;
      std::vector<int> next = dvec;
      --next[j];
      value += original(g, next);
    }
    return value;
  }

 private:
  MemoStore& store_;
  Pipeline pipeline_;
  Mode mode_;
  std::map<std::pair<int, std::vector<int>>, Rational> gcache_;
  std::map<std::pair<int, std::vector<int>>, Rational> fcache_;
};

/// Original-form integral with extended values drawn from the bracket
/// recursion (binomial pipeline, all-ones reduction spec).
inline Rational faber_original(int g, const std::vector<int>& dvec,
                               MemoStore& store) {
  FaberEngine engine(store);
  return engine.original(g, dvec);
}

/// Forward string relation over the same pipeline as faber_original.
inline Rational string_forward(int g, const std::vector<int>& dvec,
                               MemoStore& store) {
  FaberEngine engine(store);
  return engine.string_forward(g, dvec);
}

struct QueryResult {
  int g = 0;
  std::vector<int> d;
  bool extended = true;
  Rational binomial;
  Rational coeff;
  Rational closed;
  bool pass = false;
};

struct VerificationReport {
  std::vector<QueryResult> queries;
  bool pass = false;

  std::string to_json() const {
    nlohmann::json j;
    j["units"] = "C_g=1";
    j["pass"] = pass;
    nlohmann::json arr = nlohmann::json::array();
    for (const QueryResult& q : queries) {
      nlohmann::json row;
      row["g"] = q.g;
      row["d"] = q.d;
      row["form"] = q.extended ? "extended" : "original";
      row["binomial"] = rat_str(q.binomial);
      row["coeff"] = rat_str(q.coeff);
      row["closed"] = rat_str(q.closed);
      row["pass"] = q.pass;
      arr.push_back(std::move(row));
    }
    j["queries"] = std::move(arr);
    return j.dump();
  }

  std::string to_text() const {
    std::ostringstream os;
    os << "units: C_g=1\n";
    for (const QueryResult& q : queries) {
      os << "g=" << q.g << " d=(";
      for (std::size_t i = 0; i < q.d.size(); ++i)
        os << (i ? "," : "") << q.d[i];
      os << ") " << (q.extended ? "extended" : "original")
         << " binomial=" << rat_str(q.binomial)
         << " coeff=" << rat_str(q.coeff) << " closed=" << rat_str(q.closed)
         << (q.pass ? " PASS" : " FAIL") << "\n";
    }
    os << "overall: " << (pass ? "PASS" : "FAIL") << "\n";
    return os.str();
  }
};

namespace detail {

/// Partitions of total into exactly slots positive parts, descending.
inline std::vector<std::vector<int>> partitions_exact(int total, int slots) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(slots, 0);
  const std::function<void(int, int, int)> rec = [&](int i, int left,
                                                     int maxpart) {
    if (i == slots) {
      if (left == 0) out.push_back(cur);
      return;
    }
    const int remaining_slots = slots - i;
    for (int v = std::min(maxpart, left - (remaining_slots - 1)); v >= 1;
         --v) {
      cur[i] = v;
      rec(i + 1, left - v, v);
    }
  };
  if (slots >= 1 && total >= slots) rec(0, total, total);
  return out;
}

}  // namespace detail

/// Sweeps every extended query (sum d = g+n-1) and original query
/// (sum d = g+n-2) with positive psi powers, up to nmax points, comparing
/// the pathways for exact equality. Extended rows also require agreement
/// between two distinct reduction specs. Failures are reported, not thrown.
inline VerificationReport verify_range(int gmin, int gmax, int nmax,
                                       MemoStore& store, int threads = 1) {
  if (gmin < 1 || gmax < gmin || nmax < 1)
    throw std::invalid_argument("verify: bad range");

  struct Task {
    int g;
    std::vector<int> d;
    bool extended;
  };
  std::vector<Task> tasks;
  for (int g = gmin; g <= gmax; ++g) {
    for (int n = 1; n <= nmax; ++n)
      for (auto& d : detail::partitions_exact(g + n - 1, n))
        tasks.push_back({g, std::move(d), true});
    for (int n = 1; n <= nmax; ++n)
      for (auto& d : detail::partitions_exact(g + n - 2, n))
        tasks.push_back({g, std::move(d), false});
  }

  std::vector<QueryResult> results(tasks.size());
  const auto worker = [&](std::size_t begin, std::size_t step) {
    FaberEngine binomial_engine(store, FaberEngine::Pipeline::Binomial);
    FaberEngine coeff_engine(store, FaberEngine::Pipeline::Coeff);
    for (std::size_t t = begin; t < tasks.size(); t += step) {
      const Task& task = tasks[t];
      QueryResult r;
      r.g = task.g;
      r.d = task.d;
      r.extended = task.extended;
      const int n = static_cast<int>(task.d.size());
      if (task.extended) {
        r.binomial = integral_via_binomial(
            task.g, task.d, ReductionSpec::ones(n, task.g), store);
        ReductionSpec other{std::vector<int>(n, 2),
                            std::vector<int>(task.g, 1)};
        const Rational again =
            integral_via_binomial(task.g, task.d, other, store);
        r.coeff = integral_via_coeff(task.g, task.d);
        r.closed = closed_form_extended(task.g, task.d);
        r.pass = r.binomial == again && r.binomial == r.coeff &&
                 r.binomial == r.closed;
      } else {
        r.binomial = binomial_engine.original(task.g, task.d);
        r.coeff = coeff_engine.original(task.g, task.d);
        r.closed = original_form_ratio(task.g, task.d) *
                   closed_form_extended(task.g, {task.g});
        r.pass = r.binomial == r.coeff && r.binomial == r.closed;
      }
      results[t] = std::move(r);
    }
  };

  const int nthreads = std::max(1, threads);
  if (nthreads == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int i = 0; i < nthreads; ++i)
      pool.emplace_back(worker, static_cast<std::size_t>(i),
                        static_cast<std::size_t>(nthreads));
    for (auto& th : pool) th.join();
  }

  VerificationReport report;
  report.queries = std::move(results);
  report.pass = std::all_of(report.queries.begin(), report.queries.end(),
                            [](const QueryResult& q) { return q.pass; });
  return report;
}

}  // namespace drfaber
