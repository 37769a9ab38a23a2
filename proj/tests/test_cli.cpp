#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <drfaber/cli.hpp>

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  RunResult r;
  r.code = drfaber::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

long long stat_value(const std::string& err, const std::string& key) {
  const auto pos = err.find(key + "=");
  REQUIRE(pos != std::string::npos);
  return std::stoll(err.substr(pos + key.size() + 1));
}

}  // namespace

TEST_CASE("bracket command") {
  const RunResult r = run_cli({"bracket", "--genus", "1", "--parts", "1:1,1:0"});
  CHECK(r.code == 0);
  CHECK(r.out == "5\n");
  CHECK(r.err.empty());
}

TEST_CASE("bracket dimension error") {
  const RunResult r = run_cli({"bracket", "--genus", "1", "--parts", "1:2,1:0"});
  CHECK(r.code == 2);
  CHECK(r.out.empty());
  CHECK(r.err.find("dimension: sum of psi-powers must be n-1") !=
        std::string::npos);
}

TEST_CASE("integral all methods") {
  const RunResult r =
      run_cli({"integral", "--genus", "2", "--psi", "2,1", "--method", "all"});
  CHECK(r.code == 0);
  CHECK(r.out == "4\n4\n4\n");
}

TEST_CASE("integral single method with custom spec") {
  CHECK(run_cli({"integral", "--genus", "2", "--psi", "2,1", "--method",
                 "closed"})
            .out == "4\n");
  CHECK(run_cli({"integral", "--genus", "2", "--psi", "2,1", "--method",
                 "binomial", "--a", "2,3", "--b", "1,2"})
            .out == "4\n");
  CHECK(run_cli({"integral", "--genus", "2", "--psi", "2,1", "--method",
                 "binomial", "--mode", "exact"})
            .out == "4\n");
}

TEST_CASE("integral original form delegates to string inversion") {
  const RunResult r = run_cli({"integral", "--genus", "3", "--psi", "2,1",
                               "--form", "original", "--method", "binomial"});
  CHECK(r.code == 0);
  CHECK(r.out == "15/2\n");
}

TEST_CASE("faber command") {
  const RunResult r =
      run_cli({"faber", "--genus", "2", "--psi", "1,1", "--method", "all"});
  CHECK(r.code == 0);
  CHECK(r.out == "3\n3\n3\n");
}

TEST_CASE("poly command") {
  CHECK(run_cli({"poly", "--genus", "1", "--psi", "1,0"}).out ==
        "1*a1^2 + 2*a1^1*a2^1 + 2*a2^2\n");
  CHECK(run_cli({"poly", "--genus", "1", "--psi", "1,0", "--mode", "exact"})
            .out == "1*a1^2 + 2*a1^1*a2^1 + 2*a2^2 + -1\n");
}

TEST_CASE("coeff command") {
  const RunResult r =
      run_cli({"coeff", "--genus", "2", "--parts", "2:1,2:0"});
  CHECK(r.code == 0);
  CHECK(r.out == "4/3\n");
}

TEST_CASE("verify command") {
  const RunResult r =
      run_cli({"verify", "--gmin", "2", "--gmax", "2", "--nmax", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("overall: PASS") != std::string::npos);

  SECTION("json output is byte-identical across runs and threads") {
    const RunResult a = run_cli(
        {"verify", "--gmin", "2", "--gmax", "2", "--nmax", "2", "--json"});
    const RunResult b = run_cli({"verify", "--gmin", "2", "--gmax", "2",
                                 "--nmax", "2", "--json", "--threads", "3"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    const auto j = nlohmann::json::parse(a.out);
    CHECK(j["units"] == "C_g=1");
    CHECK(j["pass"] == true);
    CHECK(j["queries"].is_array());
  }
}

TEST_CASE("json output determinism for queries") {
  const std::vector<std::string> args{"bracket",  "--genus", "1",
                                      "--parts",  "1:1,1:0", "--json"};
  const RunResult a = run_cli(args);
  const RunResult b = run_cli(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j["value"] == "5");
  CHECK(j["command"] == "bracket");
}

TEST_CASE("cache round trip evaluates less on the second run") {
  namespace fs = std::filesystem;
  const std::string path =
      (fs::temp_directory_path() / "drfaber_cli_cache.v1").string();
  fs::remove(path);

  const std::vector<std::string> args{"integral", "--genus", "3",
                                      "--psi",    "3,1",     "--method",
                                      "all",      "--cache", path,
                                      "--stats"};
  const RunResult cold = run_cli(args);
  CHECK(cold.code == 0);
  CHECK(fs::exists(path));
  const RunResult warm = run_cli(args);
  CHECK(warm.code == 0);
  CHECK(warm.out == cold.out);

  const long long cold_computes = stat_value(cold.err, "computes");
  const long long warm_computes = stat_value(warm.err, "computes");
  CHECK(warm_computes < cold_computes);

  std::ifstream in(path);
  std::string first_line;
  std::getline(in, first_line);
  CHECK(first_line.rfind("v1\t", 0) == 0);
  fs::remove(path);
}

TEST_CASE("selftest quick") {
  const RunResult r = run_cli({"selftest", "--quick"});
  CHECK(r.code == 0);
  CHECK(r.out.find("selftest: PASS") != std::string::npos);
  CHECK(r.out.find("faber.pathways") != std::string::npos);
}

TEST_CASE("selftest detects a poisoned cache") {
  namespace fs = std::filesystem;
  const std::string path =
      (fs::temp_directory_path() / "drfaber_cli_poison.v1").string();
  {
    std::ofstream outfile(path);
    outfile << "v1\tg=2\tmode=S\tparts=1:0\tvalue=999\n";  // wrong value
  }
  const RunResult r = run_cli({"selftest", "--quick", "--cache", path});
  CHECK(r.code == 1);
  CHECK(r.out.find("selftest: FAIL") != std::string::npos);
  fs::remove(path);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"bracket"}).code == 2);                       // missing flags
  CHECK(run_cli({"bracket", "--genus", "1"}).code == 2);       // missing parts
  CHECK(run_cli({"frobnicate"}).code == 2);                    // no such command
  CHECK(run_cli({"bracket", "--genus", "1", "--parts", "x"}).code == 2);
  CHECK(run_cli({"bracket", "--genus", "1", "--parts", "1:1,1:0", "--mode",
                 "float"})
            .code == 2);
  CHECK(run_cli({"integral", "--genus", "2", "--psi", "2,1", "--method",
                 "magic"})
            .code == 2);
  CHECK(run_cli({"selftest", "--quick", "--full"}).code == 2);
  CHECK(run_cli({"integral", "--genus", "3", "--psi", "2,1", "--form",
                 "original", "--a", "1,2"})
            .code == 2);
  const RunResult r = run_cli({"bracket", "--genus", "1", "--parts", "y"});
  CHECK(r.err.find("drfaber:") != std::string::npos);
}

TEST_CASE("help exits zero") {
  const RunResult r = run_cli({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("bracket") != std::string::npos);
  CHECK(r.out.find("verify") != std::string::npos);
}
