#include <CLI11.hpp>
#include <geoline/suites.hpp>

#include <iostream>

namespace {

std::pair<std::string, std::string> split_eq(const std::string& s) {
  auto p = s.find('=');
  if (p == std::string::npos || p == 0 || p + 1 == s.size()) throw geoline::Error("expected name=value, got '" + s + "'");
  return {s.substr(0, p), s.substr(p + 1)};
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = std::stod(s, &used);
  if (used != s.size()) throw geoline::Error("not a number: '" + s + "'");
  return v;
}

int to_int(const std::string& s) {
  std::size_t used = 0;
  int v = std::stoi(s, &used);
  if (used != s.size()) throw geoline::Error("not an integer: '" + s + "'");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geoline: numerical checks for the geometry of oriented geodesic spaces"};
  app.require_subcommand(1);
  auto* verify = app.add_subcommand("verify", "run a verification suite");

  std::string suite;
  int n = 0, c = 0, trials = 0;
  std::uint64_t seed = 1;
  std::vector<std::string> tols;
  std::string out = ".", patch, grid;
  verify->add_option("suite", suite, "suite name")->required()->check(CLI::IsMember(geoline::suite_names()));
  auto* on = verify->add_option("--n", n, "dimension n of the space form S^{n+1}(c)");
  auto* oc = verify->add_option("--c", c, "curvature sign, -1 or 1");
  verify->add_option("--seed", seed, "64-bit seed");
  auto* ot = verify->add_option("--trials,--seeds", trials, "trial count");
  verify->add_option("--tol", tols, "tolerance override name=value (repeatable)");
  verify->add_option("--out", out, "output directory");
  verify->add_option("--patch", patch, "patch specification (JSON)");
  verify->add_option("--grid", grid, "ruled-surface grid t=INT,theta=INT");

  CLI11_PARSE(app, argc, argv);

  try {
    geoline::SuiteConfig cfg;
    cfg.suite = suite;
    if (on->count()) cfg.n = n;
    if (oc->count()) {
      if (c == 0) throw geoline::Error("c = 0 (flat case) is not supported; use -1 or 1");
      cfg.c = geoline::check_c(c);
    }
    cfg.seed = seed;
    if (ot->count()) cfg.trials = trials;
    for (const auto& t : tols) {
      auto [k, v] = split_eq(t);
      cfg.tol[k] = to_double(v);
    }
    cfg.out_dir = out;
    cfg.patch_file = patch;
    if (!grid.empty()) {
      std::stringstream ss(grid);
      std::string item;
      while (std::getline(ss, item, ',')) {
        auto [k, v] = split_eq(item);
        if (k == "t")
          cfg.grid_t = to_int(v);
        else if (k == "theta")
          cfg.grid_theta = to_int(v);
        else
          throw geoline::Error("unknown grid key '" + k + "'");
      }
    }
    geoline::SuiteResult r = geoline::run_suite(cfg);
    int failed = 0;
    for (const auto& ch : r.report["checks"]) {
      bool pass = ch["pass"].get<bool>();
      bool gated = ch["gated"].get<bool>();
      if (!pass && gated) ++failed;
      std::printf("%-5s %-8s %-60s %.6g %s %.3g\n", pass ? "ok" : "FAIL", gated ? "" : "(record)",
                  ch["name"].get<std::string>().c_str(), ch["value"].get<double>(),
                  ch["relation"].get<std::string>().c_str(), ch["tol"].get<double>());
    }
    std::printf("%s: %s (%d gated failures), report %s/%s.report.json\n", suite.c_str(),
                r.report["record_only"].get<bool>() ? "recorded" : (r.pass ? "PASS" : "FAIL"), failed, out.c_str(),
                suite.c_str());
    return r.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
