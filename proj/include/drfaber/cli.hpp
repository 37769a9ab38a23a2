#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "faber.hpp"
#include "selftest.hpp"

namespace drfaber::cli {

// Command-line surface. Exit codes: 0 success/pass, 1 verification failure,
// 2 usage or input error (one-line diagnostic on standard error). Values
// print as exact rational strings, never decimals.

namespace detail {

inline std::vector<int> parse_int_list(const std::string& text,
                                       const std::string& flag) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok =
        text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw std::invalid_argument(flag + ": expected comma-separated integers");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline std::vector<std::pair<int, int>> parse_pair_list(
    const std::string& text, const std::string& flag) {
  std::vector<std::pair<int, int>> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok =
        text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    const std::size_t colon = tok.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument(flag + ": expected x:y pairs");
    try {
      std::size_t used = 0;
      const int first = std::stoi(tok.substr(0, colon), &used);
      if (used != colon) throw std::invalid_argument(tok);
      const std::string second_text = tok.substr(colon + 1);
      const int second = std::stoi(second_text, &used);
      if (used != second_text.size()) throw std::invalid_argument(tok);
      out.emplace_back(first, second);
    } catch (const std::exception&) {
      throw std::invalid_argument(flag + ": expected x:y integer pairs");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline Mode parse_mode(const std::string& text) {
  if (text == "simplified") return Mode::Simplified;
  if (text == "exact") return Mode::Exact;
  throw std::invalid_argument("--mode: expected simplified|exact");
}

struct CommonOpts {
  bool json = false;
  bool stats = false;
  std::string cache;
  int threads = 1;
};

inline void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_flag("--json", opts.json, "machine-readable output");
  cmd->add_flag("--stats", opts.stats,
                "print evaluation counters to standard error");
  cmd->add_option("--cache", opts.cache,
                  "bracket cache file (loaded if present, saved on exit)");
  cmd->add_option("--threads", opts.threads, "worker threads for sweeps")
      ->check(CLI::Range(1, 64));
}

inline nlohmann::json pairs_json(const std::vector<std::pair<int, int>>& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [x, y] : v) arr.push_back(nlohmann::json::array({x, y}));
  return arr;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  using namespace detail;

  CLI::App app{
      "drfaber: exact intersection numbers of psi classes against "
      "lambda_g lambda_{g-1} via double ramification cycle brackets "
      "(values in C_g = 1 units)"};
  app.require_subcommand(1);

  // bracket
  auto* bracket_cmd =
      app.add_subcommand("bracket", "evaluate one bracket <prod [a;d]>_g");
  int bracket_genus = 1;
  std::string bracket_parts, bracket_mode = "simplified";
  CommonOpts bracket_opts;
  bracket_cmd->add_option("--genus", bracket_genus, "genus g >= 1")
      ->required();
  bracket_cmd
      ->add_option("--parts", bracket_parts,
                   "columns a1:d1,a2:d2,... (multiplicity:psi-power)")
      ->required();
  bracket_cmd->add_option("--mode", bracket_mode, "simplified|exact");
  add_common(bracket_cmd, bracket_opts);

  // poly
  auto* poly_cmd = app.add_subcommand(
      "poly", "bracket as a polynomial in the multiplicities");
  int poly_genus = 1;
  std::string poly_psi, poly_mode = "simplified";
  CommonOpts poly_opts;
  poly_cmd->add_option("--genus", poly_genus, "genus g >= 1")->required();
  poly_cmd->add_option("--psi", poly_psi, "psi powers d1,d2,...")->required();
  poly_cmd->add_option("--mode", poly_mode, "simplified|exact");
  add_common(poly_cmd, poly_opts);

  // integral
  auto* integral_cmd = app.add_subcommand(
      "integral", "moduli-space integral of psi powers (extended form "
                  "carries an extra psi^0 point)");
  int integral_genus = 1;
  std::string integral_psi, integral_method = "all",
              integral_form = "extended", integral_mode = "simplified";
  std::string integral_a, integral_b;
  CommonOpts integral_opts;
  integral_cmd->add_option("--genus", integral_genus, "genus g >= 1")
      ->required();
  integral_cmd->add_option("--psi", integral_psi, "psi powers d1,d2,...")
      ->required();
  integral_cmd->add_option("--method", integral_method,
                           "binomial|coeff|closed|all");
  integral_cmd->add_option("--form", integral_form, "extended|original");
  integral_cmd->add_option("--a", integral_a,
                           "marked-point multiplicities a1,...,an");
  integral_cmd->add_option("--b", integral_b,
                           "extra-point multiplicities b1,...,bg");
  integral_cmd->add_option("--mode", integral_mode, "simplified|exact");
  add_common(integral_cmd, integral_opts);

  // faber
  auto* faber_cmd = app.add_subcommand(
      "faber", "original-form integral (no psi^0 point) by string inversion");
  int faber_genus = 2;
  std::string faber_psi, faber_method = "all";
  CommonOpts faber_opts;
  faber_cmd->add_option("--genus", faber_genus, "genus g >= 1")->required();
  faber_cmd->add_option("--psi", faber_psi, "psi powers d1,d2,...")
      ->required();
  faber_cmd->add_option("--method", faber_method, "binomial|coeff|closed|all");
  add_common(faber_cmd, faber_opts);

  // coeff
  auto* coeff_cmd =
      app.add_subcommand("coeff", "coefficient bracket <prod |p;c|>_g");
  int coeff_genus = 1;
  std::string coeff_parts;
  CommonOpts coeff_opts;
  coeff_cmd->add_option("--genus", coeff_genus, "genus g >= 1")->required();
  coeff_cmd
      ->add_option("--parts", coeff_parts, "columns p1:c1,p2:c2,...")
      ->required();
  add_common(coeff_cmd, coeff_opts);

  // verify
  auto* verify_cmd = app.add_subcommand(
      "verify", "sweep all queries in range and cross-check the pathways");
  int verify_gmin = 2, verify_gmax = 4, verify_nmax = 3;
  CommonOpts verify_opts;
  verify_cmd->add_option("--gmin", verify_gmin, "lowest genus (default 2)");
  verify_cmd->add_option("--gmax", verify_gmax, "highest genus (default 4)");
  verify_cmd->add_option("--nmax", verify_nmax,
                         "largest point count (default 3)");
  add_common(verify_cmd, verify_opts);

  // selftest
  auto* selftest_cmd =
      app.add_subcommand("selftest", "run the property suites");
  bool selftest_quick = false, selftest_full = false;
  CommonOpts selftest_opts;
  selftest_cmd->add_flag("--quick", selftest_quick,
                         "genus <= 2 suites (default)");
  selftest_cmd->add_flag("--full", selftest_full, "full desk-scale suites");
  add_common(selftest_cmd, selftest_opts);

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("drfaber");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "drfaber: " << e.what() << "\n";
    return 2;
  }

  const CommonOpts& opts = bracket_cmd->parsed()    ? bracket_opts
                           : poly_cmd->parsed()     ? poly_opts
                           : integral_cmd->parsed() ? integral_opts
                           : faber_cmd->parsed()    ? faber_opts
                           : coeff_cmd->parsed()    ? coeff_opts
                           : verify_cmd->parsed()   ? verify_opts
                                                    : selftest_opts;

  MemoStore store;
  int exit_code = 0;
  try {
    if (!opts.cache.empty() && std::filesystem::exists(opts.cache))
      store.load(opts.cache);

    if (bracket_cmd->parsed()) {
      const auto pairs = parse_pair_list(bracket_parts, "--parts");
      std::vector<Part> parts;
      for (const auto& [a, d] : pairs) parts.push_back(Part{a, d});
      const Mode mode = parse_mode(bracket_mode);
      const Rational value = genusg_bracket(bracket_genus, parts, mode, store);
      if (opts.json) {
        nlohmann::json j;
        j["command"] = "bracket";
        j["genus"] = bracket_genus;
        j["mode"] = bracket_mode;
        j["parts"] = pairs_json(pairs);
        j["value"] = rat_str(value);
        out << j.dump() << "\n";
      } else {
        out << rat_str(value) << "\n";
      }
    } else if (poly_cmd->parsed()) {
      const std::vector<int> dvec = parse_int_list(poly_psi, "--psi");
      const Mode mode = parse_mode(poly_mode);
      const MPoly p = bracket_polynomial(poly_genus, dvec, mode, store);
      if (opts.json) {
        nlohmann::json j;
        j["command"] = "poly";
        j["genus"] = poly_genus;
        j["mode"] = poly_mode;
        j["psi"] = dvec;
        j["poly"] = poly_text(p);
        out << j.dump() << "\n";
      } else {
        out << poly_text(p) << "\n";
      }
    } else if (integral_cmd->parsed() || faber_cmd->parsed()) {
      const bool original = faber_cmd->parsed() || integral_form == "original";
      if (integral_cmd->parsed() && integral_form != "extended" &&
          integral_form != "original")
        throw std::invalid_argument("--form: expected extended|original");
      const int g = faber_cmd->parsed() ? faber_genus : integral_genus;
      const std::vector<int> dvec = parse_int_list(
          faber_cmd->parsed() ? faber_psi : integral_psi, "--psi");
      const std::string method =
          faber_cmd->parsed() ? faber_method : integral_method;
      if (method != "binomial" && method != "coeff" && method != "closed" &&
          method != "all")
        throw std::invalid_argument(
            "--method: expected binomial|coeff|closed|all");
      const Mode mode =
          parse_mode(faber_cmd->parsed() ? "simplified" : integral_mode);
      const int n = static_cast<int>(dvec.size());

      std::optional<ReductionSpec> spec;
      if (integral_cmd->parsed() &&
          (!integral_a.empty() || !integral_b.empty())) {
        if (original)
          throw std::invalid_argument(
              "--a/--b apply to the extended form only");
        ReductionSpec s = ReductionSpec::ones(n, g);
        if (!integral_a.empty()) s.avec = parse_int_list(integral_a, "--a");
        if (!integral_b.empty()) s.bvec = parse_int_list(integral_b, "--b");
        spec = std::move(s);
      }

      std::vector<std::pair<std::string, Rational>> values;
      const auto want = [&](const char* name) {
        return method == "all" || method == name;
      };
      if (original) {
        if (want("binomial")) {
          FaberEngine engine(store, FaberEngine::Pipeline::Binomial, mode);
          values.emplace_back("binomial", engine.original(g, dvec));
        }
        if (want("coeff")) {
          FaberEngine engine(store, FaberEngine::Pipeline::Coeff);
          values.emplace_back("coeff", engine.original(g, dvec));
        }
        if (want("closed"))
          values.emplace_back(
              "closed", original_form_ratio(g, dvec) * one_point_base(g));
      } else {
        if (want("binomial"))
          values.emplace_back(
              "binomial",
              integral_via_binomial(
                  g, dvec, spec ? *spec : ReductionSpec::ones(n, g), store,
                  mode));
        if (want("coeff")) values.emplace_back("coeff", integral_via_coeff(g, dvec));
        if (want("closed"))
          values.emplace_back("closed", closed_form_extended(g, dvec));
      }

      bool agree = true;
      for (const auto& [name, v] : values)
        if (v != values.front().second) agree = false;
      if (opts.json) {
        nlohmann::json j;
        j["command"] = faber_cmd->parsed() ? "faber" : "integral";
        j["form"] = original ? "original" : "extended";
        j["genus"] = g;
        j["psi"] = dvec;
        j["method"] = method;
        for (const auto& [name, v] : values) j[name] = rat_str(v);
        if (method == "all") j["pass"] = agree;
        out << j.dump() << "\n";
      } else {
        for (const auto& [name, v] : values) out << rat_str(v) << "\n";
      }
      if (method == "all" && !agree) exit_code = 1;
    } else if (coeff_cmd->parsed()) {
      const auto pairs = parse_pair_list(coeff_parts, "--parts");
      CoeffKey key{coeff_genus, {}};
      for (const auto& [p, c] : pairs) key.entries.push_back({p, c});
      const Rational value = coeff_bracket(key);
      if (opts.json) {
        nlohmann::json j;
        j["command"] = "coeff";
        j["genus"] = coeff_genus;
        j["entries"] = pairs_json(pairs);
        j["value"] = rat_str(value);
        out << j.dump() << "\n";
      } else {
        out << rat_str(value) << "\n";
      }
    } else if (verify_cmd->parsed()) {
      const VerificationReport report = verify_range(
          verify_gmin, verify_gmax, verify_nmax, store, opts.threads);
      if (opts.json)
        out << report.to_json() << "\n";
      else
        out << report.to_text();
      if (!report.pass) exit_code = 1;
    } else if (selftest_cmd->parsed()) {
      if (selftest_quick && selftest_full)
        throw std::invalid_argument("selftest: pick one of --quick, --full");
      const SelftestScale scale =
          selftest_full ? SelftestScale::Full : SelftestScale::Quick;
      if (opts.json) {
        const SelftestReport report =
            run_selftest(scale, store, nullptr, opts.threads);
        nlohmann::json j;
        j["command"] = "selftest";
        j["scale"] = selftest_full ? "full" : "quick";
        nlohmann::json suites = nlohmann::json::array();
        for (const auto& s : report.suites) {
          nlohmann::json row;
          row["name"] = s.name;
          row["checks"] = s.checks;
          row["failures"] = s.failures;
          suites.push_back(std::move(row));
        }
        j["suites"] = std::move(suites);
        j["checks"] = report.checks();
        j["failures"] = report.failures();
        j["pass"] = report.pass();
        out << j.dump() << "\n";
        if (!report.pass()) exit_code = 1;
      } else {
        const SelftestReport report =
            run_selftest(scale, store, &out, opts.threads);
        out << "selftest: " << (report.pass() ? "PASS" : "FAIL") << " ("
            << report.checks() << " checks, " << report.failures()
            << " failures)\n";
        if (!report.pass()) exit_code = 1;
      }
    }

    if (opts.stats) {
      const MemoStore::Stats s = store.stats();
      err << "stats: computes=" << s.computes << " hits=" << s.hits
          << " misses=" << s.misses << " store_size=" << store.size() << "\n";
    }
    if (!opts.cache.empty()) store.save(opts.cache);
  } catch (const std::exception& e) {
    err << "drfaber: " << e.what() << "\n";
    return 2;
  }
  return exit_code;
}

}  // namespace drfaber::cli
