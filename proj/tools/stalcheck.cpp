// Command-line driver: ingests a metric spec, runs the residual batteries,
// and emits a deterministic JSON report.  Exit status: 0 all checks pass,
// 1 at least one residual exceeded its tolerance, 2 input or chart error.

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stal/checks.hpp"

namespace {

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

stal::TolOverrides parse_tols(const std::vector<std::string>& items) {
  stal::TolOverrides tol;
  for (const std::string& item : items) {
    std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("--tol expects name=value, got '" + item + "'");
    std::size_t used = 0;
    double v = std::stod(item.substr(eq + 1), &used);
    if (eq + 1 + used != item.size())
      throw std::invalid_argument("--tol value does not parse in '" + item + "'");
    tol[item.substr(0, eq)] = v;
  }
  return tol;
}

int finish(stal::CheckReport& rep, const std::string& json_path,
           bool no_timestamp) {
  if (!no_timestamp) rep.timestamp = utc_timestamp();
  std::string text = stal::emit_report(rep);
  if (json_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    std::ofstream out(json_path, std::ios::binary);
    out << text;
    if (!out) {
      std::fprintf(stderr, "error: cannot write '%s'\n", json_path.c_str());
      return 2;
    }
  }
  for (const stal::CheckEntry& c : rep.checks)
    if (!c.pass)
      std::fprintf(stderr, "FAIL %s residual=%s tolerance=%s\n", c.name.c_str(),
                   stal::format_number(c.residual).c_str(),
                   stal::format_number(c.tolerance).c_str());
  std::fprintf(stderr, "%d/%zu checks passed\n", rep.passed(),
               rep.checks.size());
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"residual checker for the Clifford bundle formulation"};
  app.require_subcommand(1);

  std::string metric_path, json_path;
  int points = 5;
  int id_count = 1000;
  std::uint64_t seed = 42;
  std::vector<std::string> tol_items;
  std::vector<double> radii{50, 100, 200, 400, 800};
  int quad_order = 32;
  bool no_timestamp = false;
  bool inject_fault = false;

  auto add_common = [&](CLI::App* cmd, bool needs_metric) {
    if (needs_metric)
      cmd->add_option("--metric", metric_path, "metric spec file")
          ->required()
          ->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "random point seed");
    cmd->add_option("--tol", tol_items, "tolerance override name=value");
    cmd->add_option("--json", json_path, "write the report to this path");
    cmd->add_flag("--no-timestamp", no_timestamp,
                  "omit the timestamp for byte-identical reruns");
  };

  CLI::App* cmd_identities =
      app.add_subcommand("identities", "seeded value-algebra identity sweeps");
  add_common(cmd_identities, false);
  cmd_identities->add_option("--points", id_count, "number of random samples");
  cmd_identities->add_flag("--inject-fault", inject_fault)->group("");

  CLI::App* cmd_check =
      app.add_subcommand("check", "full residual battery at random chart points");
  add_common(cmd_check, true);
  cmd_check->add_option("--points", points, "number of random chart points");

  CLI::App* cmd_energy =
      app.add_subcommand("energy", "surface-integral mass with limit");
  add_common(cmd_energy, true);
  cmd_energy->add_option("--radii", radii, "integration sphere radii")
      ->delimiter(',');
  cmd_energy->add_option("--quad-order", quad_order, "quadrature order");

  CLI::App* cmd_claims =
      app.add_subcommand("claims", "equivalence, vacuum field strength, wave-law witness");
  add_common(cmd_claims, true);
  cmd_claims->add_option("--points", points, "number of random chart points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    stal::TolOverrides tol = parse_tols(tol_items);
    stal::CheckReport rep;
    if (*cmd_identities) {
      rep = stal::run_identities(seed, id_count, tol, inject_fault);
    } else {
      stal::MetricSpec spec = stal::load_metric_file(metric_path);
      if (*cmd_check)
        rep = stal::run_check(spec, points, seed, tol);
      else if (*cmd_energy)
        rep = stal::run_energy(spec, radii, quad_order, tol);
      else
        rep = stal::run_claims(spec, points, seed, tol);
    }
    return finish(rep, json_path, no_timestamp);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
