// Command-line front end. Talks to the library exclusively through the
// public C interface, so it doubles as a smoke test of that surface.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mebns/mebns.h"

namespace {

// Exit codes: 0 success, 2 configuration mistakes, 1 everything else.
int exit_code_of(mebns_status rc) {
  return rc == MEBNS_ERR_CONFIG ? 2 : 1;
}

int fail(mebns_status rc) {
  std::cerr << "error: " << mebns_last_error() << "\n";
  return exit_code_of(rc);
}

struct ConfigDeleter {
  void operator()(mebns_config* cfg) const { mebns_config_free(cfg); }
};
using ConfigHandle = std::unique_ptr<mebns_config, ConfigDeleter>;

struct StringDeleter {
  void operator()(char* s) const { mebns_string_free(s); }
};
using StringHandle = std::unique_ptr<char, StringDeleter>;

// Shared flags of every subcommand that runs under a configuration.
struct ConfigArgs {
  std::string config_path;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void add_config_flags(CLI::App* cmd, ConfigArgs* args) {
  cmd->add_option("-c,--config", args->config_path,
                  "configuration file (key=value lines)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", args->sets,
                  "override one configuration key, e.g. --set filter.beta=0.3 "
                  "(repeatable)");
  cmd->add_option("--seed", args->seed,
                  "run seed; wins over --set run.seed")
      ->each([args](const std::string&) { args->seed_given = true; });
}

// File (if any), then --set overrides in order, then --seed.
mebns_status build_config(const ConfigArgs& args, ConfigHandle& out) {
  mebns_config* cfg = nullptr;
  if (!args.config_path.empty()) {
    if (mebns_status rc = mebns_config_load(args.config_path.c_str(), &cfg))
      return rc;
  } else {
    cfg = mebns_config_create();
  }
  out.reset(cfg);
  for (const std::string& kv : args.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::cerr << "error: --set expects key=value, got '" << kv << "'\n";
      return MEBNS_ERR_CONFIG;
    }
    if (mebns_status rc = mebns_config_set(cfg, kv.substr(0, eq).c_str(),
                                           kv.substr(eq + 1).c_str()))
      return rc;
  }
  if (args.seed_given) {
    if (mebns_status rc =
            mebns_config_set(cfg, "run.seed", std::to_string(args.seed).c_str()))
      return rc;
  }
  return mebns_config_validate(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mebns: negative-sampling link prediction trainer"};
  app.set_version_flag("--version", std::string(mebns_version()));
  app.require_subcommand(1);

  // split ------------------------------------------------------------------
  ConfigArgs split_args;
  std::string split_out;
  CLI::App* split = app.add_subcommand(
      "split", "write the 70/10/20 edge-split manifest");
  add_config_flags(split, &split_args);
  split->add_option("-o,--out", split_out, "manifest JSON path")->required();

  // train ------------------------------------------------------------------
  ConfigArgs train_args;
  std::string train_out;
  std::string train_mebns = "on";
  bool train_log_scores = false;
  bool train_dump_samples = false;
  bool train_verbose = false;
  CLI::App* train = app.add_subcommand("train", "run the training pipeline");
  add_config_flags(train, &train_args);
  train->add_option("-o,--out", train_out, "output directory")->required();
  train->add_option("--mebns", train_mebns,
                    "run the reweighted student phase after the teacher "
                    "(default on)")
      ->check(CLI::IsMember({"on", "off"}));
  train->add_flag("--log-scores", train_log_scores,
                  "record probe-set scores at the configured epochs");
  train->add_flag("--dump-samples", train_dump_samples,
                  "dump every epoch's training samples to samples.csv");
  train->add_flag("-v,--verbose", train_verbose,
                  "progress and wall-clock timing on stdout");

  // eval -------------------------------------------------------------------
  ConfigArgs eval_args;
  std::string eval_checkpoint, eval_out;
  CLI::App* eval = app.add_subcommand(
      "eval", "test metrics of a parameter checkpoint");
  add_config_flags(eval, &eval_args);
  eval->add_option("--checkpoint", eval_checkpoint, "parameter checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("-o,--out", eval_out,
                   "write metrics JSON here instead of stdout");

  // migration ---------------------------------------------------------------
  std::string mig_scores, mig_out;
  std::int64_t mig_a = 0, mig_b = 0;
  double mig_gap = 0.3;
  CLI::App* migration = app.add_subcommand(
      "migration", "cross-epoch easy/hard migration matrix of a score log");
  migration->add_option("--scores", mig_scores, "probe score log CSV")
      ->required()
      ->check(CLI::ExistingFile);
  migration->add_option("--epoch-a", mig_a, "earlier epoch")->required();
  migration->add_option("--epoch-b", mig_b, "later epoch")->required();
  migration->add_option("--gap", mig_gap,
                        "score gap below which a sample counts as unmoved "
                        "(default 0.3)");
  migration->add_option("-o,--out", mig_out, "per-sample CSV path");

  // theorem-check ------------------------------------------------------------
  std::int64_t thm_instances = 200, thm_size = 10;
  std::uint64_t thm_seed = 42;
  double thm_tol = 1e-9;
  std::string thm_out;
  CLI::App* theorem = app.add_subcommand(
      "theorem-check",
      "numeric check of the reweighted-loss landscape gap bound");
  theorem->add_option("--instances", thm_instances,
                      "random instances to draw (default 200)");
  theorem->add_option("--size", thm_size, "losses per instance (default 10)");
  theorem->add_option("--seed", thm_seed, "generator seed (default 42)");
  theorem->add_option("--tolerance", thm_tol,
                      "violation tolerance (default 1e-9)");
  theorem->add_option("-o,--out", thm_out, "full report JSON path");

  CLI11_PARSE(app, argc, argv);

  if (split->parsed()) {
    ConfigHandle cfg;
    if (mebns_status rc = build_config(split_args, cfg)) return fail(rc);
    if (mebns_status rc = mebns_run_split(cfg.get(), split_out.c_str()))
      return fail(rc);
    std::cout << "wrote " << split_out << "\n";
    return 0;
  }

  if (train->parsed()) {
    ConfigHandle cfg;
    if (mebns_status rc = build_config(train_args, cfg)) return fail(rc);
    if (mebns_status rc = mebns_run_train(
            cfg.get(), train_out.c_str(), train_mebns == "on" ? 1 : 0,
            train_log_scores ? 1 : 0, train_dump_samples ? 1 : 0,
            train_verbose ? 1 : 0))
      return fail(rc);
    std::cout << "wrote " << train_out << "/report.json\n";
    return 0;
  }

  if (eval->parsed()) {
    ConfigHandle cfg;
    if (mebns_status rc = build_config(eval_args, cfg)) return fail(rc);
    char* json = nullptr;
    if (mebns_status rc =
            mebns_run_eval(cfg.get(), eval_checkpoint.c_str(), &json))
      return fail(rc);
    StringHandle guard(json);
    if (eval_out.empty()) {
      std::cout << json << "\n";
    } else {
      std::ofstream out(eval_out);
      out << json << "\n";
      if (!out) {
        std::cerr << "error: cannot write " << eval_out << "\n";
        return 1;
      }
    }
    return 0;
  }

  if (migration->parsed()) {
    char* json = nullptr;
    if (mebns_status rc = mebns_run_migration(
            mig_scores.c_str(), mig_a, mig_b, mig_gap,
            mig_out.empty() ? nullptr : mig_out.c_str(), &json))
      return fail(rc);
    StringHandle guard(json);
    std::cout << json << "\n";
    return 0;
  }

  if (theorem->parsed()) {
    std::int64_t violations = 0;
    if (mebns_status rc = mebns_run_theorem_check(
            thm_instances, thm_size, thm_seed, thm_tol,
            thm_out.empty() ? nullptr : thm_out.c_str(), &violations))
      return fail(rc);
    std::cout << "instances: " << thm_instances << "  violations: " << violations
              << "\n";
    return violations == 0 ? 0 : 1;
  }

  return 0;
}
