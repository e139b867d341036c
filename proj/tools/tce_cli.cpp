// Command-line front end: orbit | partition | return | renorm | verify.

#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "tce/tce.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<unsigned> precision;
  std::optional<std::uint64_t> seed, max_w, depth, samples;
  bool strict = false;
};

tce::RunConfig make_config(const Options& o) {
  tce::ConfigOverrides ov;
  ov.precision_bits = o.precision;
  ov.seed = o.seed;
  ov.max_w = o.max_w;
  ov.depth = o.depth;
  ov.samples = o.samples;
  ov.strict = o.strict;
  if (!o.config.empty()) return tce::load_config(o.config, ov);
  return tce::config_from_json(tce::Json::object(), ov);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Translated cone exchange toolkit"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "JSON run configuration");
  app.add_option("--out", o.out, "output file (default: stdout)");
  app.add_option("--precision", o.precision, "working precision in bits (>= 64)");
  app.add_option("--seed", o.seed, "seed for all sampling");
  app.add_option("--max-w", o.max_w, "partition: atoms up to this w above the anchor");
  app.add_option("--depth", o.depth, "renorm: tower depth");
  app.add_option("--samples", o.samples, "renorm/return: samples per check");
  app.add_flag("--strict-boundaries", o.strict, "treat guard-band ambiguity as an error");
  auto* orbit = app.add_subcommand("orbit", "forward orbits as CSV");
  auto* partition = app.add_subcommand("partition", "first-return partition as JSON");
  auto* ret = app.add_subcommand("return", "closed-form vs brute-force return map as CSV");
  auto* renorm = app.add_subcommand("renorm", "renormalization tower report as JSON");
  auto* verify = app.add_subcommand("verify", "run invariant suites, JSON report");
  for (auto* sub : {orbit, partition, ret, renorm, verify}) sub->fallthrough();
  CLI11_PARSE(app, argc, argv);

  tce::RunConfig cfg;
  try {
    cfg = make_config(o);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return tce::kExitConfig;
  }

  std::unique_ptr<std::ofstream> file;
  if (!o.out.empty()) {
    file = std::make_unique<std::ofstream>(o.out);
    if (!*file) {
      std::cerr << "cannot open " << o.out << '\n';
      return tce::kExitRuntime;
    }
  }
  std::ostream& out = file ? *file : std::cout;

  try {
    if (orbit->parsed()) {
      const auto sum = tce::cmd_orbit(cfg, out, std::cerr);
      std::cerr << sum.points << " orbits, " << sum.rows << " rows, " << sum.skipped << " skipped\n";
      return tce::kExitOk;
    }
    if (partition->parsed()) {
      out << tce::cmd_partition(cfg).dump(2) << '\n';
      return tce::kExitOk;
    }
    if (ret->parsed()) {
      const auto sum = tce::cmd_return(cfg, out);
      std::cerr << sum.rows << " rows, " << sum.agree << " agree, " << sum.flagged << " flagged\n";
      return sum.agree + sum.flagged == sum.rows ? tce::kExitOk : tce::kExitFailure;
    }
    if (renorm->parsed()) {
      const auto res = tce::cmd_renorm(cfg);
      out << res.report.dump(2) << '\n';
      return res.exit_code;
    }
    if (verify->parsed()) {
      bool ok = false;
      out << tce::cmd_verify(cfg, ok).dump(2) << '\n';
      return ok ? tce::kExitOk : tce::kExitFailure;
    }
  } catch (const tce::InvalidParameters& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return tce::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return tce::kExitRuntime;
  }
  return tce::kExitOk;
}
