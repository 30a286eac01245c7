// ipslab: batch experiment driver. One subcommand per experiment kind; each
// reads a key = value config, runs the experiment deterministically, and
// writes results.csv plus summary.json into the output directory.
//
// Exit codes: 0 all verdicts pass/indeterminate, 2 any verdict failed,
// 1 configuration or runtime error.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "ips/runner.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::optional<int> workers;
};

int run_kind(const std::string& kind, const CommonArgs& args) {
  ips::ExperimentConfig cfg = ips::ExperimentConfig::from_file(args.config_path);
  if (cfg.kind != kind)
    throw std::invalid_argument("config kind '" + cfg.kind + "' does not match subcommand '" +
                                kind + "'");
  if (args.seed) cfg.override_seed(*args.seed);
  if (args.workers) cfg.override_workers(*args.workers);

  const ips::ResultBundle bundle = ips::run(cfg);

  std::filesystem::create_directories(args.out_dir);
  {
    std::ofstream csv(args.out_dir + "/results.csv", std::ios::binary);
    csv << bundle.csv();
  }
  {
    std::ofstream json(args.out_dir + "/summary.json", std::ios::binary);
    json << bundle.json_summary();
  }

  int pass = 0, fail = 0, indet = 0, info = 0;
  for (const ips::ResultRow& row : bundle.rows) {
    switch (ips::evaluate(row)) {
      case ips::Verdict::Pass: ++pass; break;
      case ips::Verdict::Fail: ++fail; break;
      case ips::Verdict::Indeterminate: ++indet; break;
      default: ++info; break;
    }
  }
  std::cout << kind << " " << bundle.config_hash << ": " << pass << " pass, " << fail << " fail, "
            << indet << " indeterminate, " << info << " info -> " << args.out_dir
            << "/results.csv\n";
  if (fail > 0) {
    for (const ips::ResultRow& row : bundle.rows) {
      if (ips::evaluate(row) == ips::Verdict::Fail)
        std::cout << "  FAIL " << row.quantity << " t=" << row.t << " k=" << row.k
                  << " estimate=" << row.estimate << " bound=" << *row.bound << " ("
                  << row.bound_name << ")\n";
    }
  }
  return bundle.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coupling and concentration experiments on lattice particle systems"};
  app.require_subcommand(1);

  CommonArgs args;
  const char* kinds[] = {"sep", "asep", "voter", "contact", "glauber", "gibbs1d", "rw", "bounds"};
  for (const char* kind : kinds) {
    CLI::App* sub = app.add_subcommand(kind, std::string("run a '") + kind + "' experiment");
    sub->add_option("--config", args.config_path, "config file (key = value lines)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", args.seed, "override the config master seed");
    sub->add_option("--out", args.out_dir, "output directory (default: out)");
    sub->add_option("--workers", args.workers, "worker threads (results are invariant)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help is success, any parse problem is an error
  }

  try {
    for (const char* kind : kinds) {
      if (app.got_subcommand(kind)) return run_kind(kind, args);
    }
    std::cerr << "no subcommand selected\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
