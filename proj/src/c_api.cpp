#include "mebns/mebns.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>

#include <json.hpp>

#include "mebns/config.hpp"
#include "mebns/distill.hpp"
#include "mebns/error.hpp"
#include "mebns/graph.hpp"
#include "mebns/landscape.hpp"
#include "mebns/migration.hpp"
#include "mebns/params.hpp"
#include "mebns/pipeline.hpp"

using mebns::Error;
using mebns::ErrorKind;

struct mebns_config {
  mebns::RunConfig cfg;
};

struct mebns_graph {
  mebns::Graph g;
  explicit mebns_graph(mebns::Graph graph) : g(std::move(graph)) {}
};

namespace {

thread_local std::string t_last_error;

mebns_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return MEBNS_ERR_CONFIG;
    case ErrorKind::io: return MEBNS_ERR_IO;
    case ErrorKind::parse: return MEBNS_ERR_PARSE;
    case ErrorKind::numeric: return MEBNS_ERR_NUMERIC;
    case ErrorKind::runtime: return MEBNS_ERR_RUNTIME;
  }
  return MEBNS_ERR_RUNTIME;
}

// Runs `fn` and folds every failure into a status + thread-local message.
template <typename Fn>
mebns_status guarded(Fn&& fn) {
  try {
    fn();
    t_last_error.clear();
    return MEBNS_OK;
  } catch (const Error& e) {
    t_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return MEBNS_ERR_RUNTIME;
  } catch (...) {
    t_last_error = "unknown error";
    return MEBNS_ERR_RUNTIME;
  }
}

char* alloc_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mebns_status require(bool ok, const char* what) {
  if (ok) return MEBNS_OK;
  t_last_error = what;
  return MEBNS_ERR_CONFIG;
}

}  // namespace

extern "C" {

const char* mebns_version(void) { return "1.0.0"; }

const char* mebns_last_error(void) { return t_last_error.c_str(); }

void mebns_string_free(char* s) { std::free(s); }

/* ---- configuration ---------------------------------------------------- */

mebns_config* mebns_config_create(void) { return new mebns_config(); }

mebns_status mebns_config_load(const char* path, mebns_config** out) {
  if (auto st = require(path && out, "null argument to mebns_config_load"))
    return st;
  *out = nullptr;
  return guarded([&] { *out = new mebns_config{mebns::parse_config(path)}; });
}

mebns_status mebns_config_set(mebns_config* cfg, const char* key,
                              const char* value) {
  if (auto st = require(cfg && key && value,
                        "null argument to mebns_config_set"))
    return st;
  return guarded([&] { mebns::apply_config_override(cfg->cfg, key, value); });
}

mebns_status mebns_config_validate(const mebns_config* cfg) {
  if (auto st = require(cfg != nullptr, "null config")) return st;
  return guarded([&] { mebns::validate_config(cfg->cfg); });
}

mebns_status mebns_config_to_json(const mebns_config* cfg, char** json_out) {
  if (auto st = require(cfg && json_out,
                        "null argument to mebns_config_to_json"))
    return st;
  return guarded(
      [&] { *json_out = alloc_string(mebns::config_to_json(cfg->cfg).dump(2)); });
}

void mebns_config_free(mebns_config* cfg) { delete cfg; }

/* ---- dataset ----------------------------------------------------------- */

mebns_status mebns_graph_load(const mebns_config* cfg, mebns_graph** out) {
  if (auto st = require(cfg && out, "null argument to mebns_graph_load"))
    return st;
  *out = nullptr;
  return guarded([&] {
    *out = new mebns_graph(mebns::load_graph(cfg->cfg.edges, cfg->cfg.features,
                                             cfg->cfg.num_nodes,
                                             cfg->cfg.onehot_dim));
  });
}

int64_t mebns_graph_nodes(const mebns_graph* g) {
  return g ? g->g.num_nodes() : 0;
}

int64_t mebns_graph_edges(const mebns_graph* g) {
  return g ? g->g.num_edges() : 0;
}

int64_t mebns_graph_feature_dim(const mebns_graph* g) {
  return g ? g->g.feature_dim() : 0;
}

void mebns_graph_free(mebns_graph* g) { delete g; }

/* ---- runs -------------------------------------------------------------- */

mebns_status mebns_run_split(const mebns_config* cfg, const char* out_path) {
  if (auto st = require(cfg && out_path, "null argument to mebns_run_split"))
    return st;
  return guarded([&] {
    mebns::Trainer trainer(cfg->cfg);
    trainer.write_split_manifest(out_path);
  });
}

mebns_status mebns_run_train(const mebns_config* cfg, const char* out_dir,
                             int use_mebns, int log_scores, int dump_samples,
                             int verbose) {
  if (auto st = require(cfg && out_dir, "null argument to mebns_run_train"))
    return st;
  return guarded([&] {
    namespace fs = std::filesystem;
    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
      throw Error::io("cannot create output directory '" + dir.string() +
                      "': " + ec.message());

    mebns::Trainer trainer(cfg->cfg);
    mebns::RunOptions options;
    options.mebns = use_mebns != 0;
    options.log_scores = log_scores != 0;
    options.verbose = verbose != 0;
    if (dump_samples != 0) {
      options.dump_samples_path = (dir / "samples.csv").string();
      fs::remove(options.dump_samples_path, ec);  // dump appends; start fresh
    }

    mebns::RunResult result = trainer.run(options);
    const std::vector<std::string> header = trainer.artifact_header();

    mebns::write_report_json((dir / "report.json").string(), result.report);
    {
      std::ofstream out(dir / "config.cfg");
      if (!out) throw Error::io("cannot write " + (dir / "config.cfg").string());
      out << mebns::config_to_text(trainer.config());
    }
    trainer.write_split_manifest((dir / "split.json").string());
    mebns::save_checkpoint(result.teacher, (dir / "teacher.ckpt").string());
    if (options.mebns) {
      mebns::save_checkpoint(result.student, (dir / "student.ckpt").string());
      mebns::save_checkpoint(result.meta, (dir / "meta.ckpt").string());
      mebns::write_telemetry_jsonl((dir / "telemetry.jsonl").string(),
                                   result.telemetry);
      if (result.has_uncertainty)
        mebns::write_uncertainty_csv((dir / "uncertainty.csv").string(),
                                     result.meta_pool, result.uncertainty,
                                     trainer.config().tau, header);
    }
    if (options.log_scores)
      result.report.score_log.write_csv((dir / "scores.csv").string(), header);

    if (options.verbose) {
      const auto& tt = result.report.teacher_timing;
      std::cout << "[time] teacher: " << tt.seconds << " s over " << tt.epochs
                << " epochs (" << tt.per_epoch() << " s/epoch)\n";
      if (options.mebns) {
        const auto& st = result.report.student_timing;
        std::cout << "[time] student: " << st.seconds << " s over "
                  << st.epochs << " epochs (" << st.per_epoch()
                  << " s/epoch)\n";
      }
    }
  });
}

mebns_status mebns_run_eval(const mebns_config* cfg,
                            const char* checkpoint_path,
                            char** metrics_json_out) {
  if (auto st = require(cfg && checkpoint_path && metrics_json_out,
                        "null argument to mebns_run_eval"))
    return st;
  return guarded([&] {
    mebns::Trainer trainer(cfg->cfg);
    const mebns::ParamStore params = mebns::load_checkpoint(checkpoint_path);
    const mebns::TestMetrics t = trainer.evaluate(params);
    nlohmann::ordered_json j{
        {"auc", t.auc}, {"hits20", t.hits20}, {"hits30", t.hits30}};
    *metrics_json_out = alloc_string(j.dump(2));
  });
}

mebns_status mebns_run_migration(const char* scores_csv_path, int64_t epoch_a,
                                 int64_t epoch_b, double gap_threshold,
                                 const char* out_csv,
                                 char** summary_json_out) {
  if (auto st = require(scores_csv_path && summary_json_out,
                        "null argument to mebns_run_migration"))
    return st;
  return guarded([&] {
    const mebns::ScoreLog log = mebns::ScoreLog::read_csv(scores_csv_path);
    const mebns::MigrationSummary summary =
        mebns::migration_matrix(log, epoch_a, epoch_b, gap_threshold);
    if (out_csv != nullptr) {
      const std::vector<std::string> header = {
          "# schema: mebns-migration/1",
          "# epochs: " + std::to_string(epoch_a) + " -> " +
              std::to_string(epoch_b)};
      mebns::write_migration_csv(out_csv, log, summary, header);
    }
    nlohmann::ordered_json j{{"schema", "mebns-migration/1"},
                             {"epoch_a", epoch_a},
                             {"epoch_b", epoch_b},
                             {"gap_threshold", gap_threshold},
                             {"green", summary.green},
                             {"yellow", summary.yellow},
                             {"red", summary.red},
                             {"red_fraction", summary.red_fraction()}};
    *summary_json_out = alloc_string(j.dump(2));
  });
}

mebns_status mebns_run_theorem_check(int64_t instances, int64_t size,
                                     uint64_t seed, double tolerance,
                                     const char* out_json,
                                     int64_t* violations_out) {
  return guarded([&] {
    const mebns::TheoremReport report =
        mebns::verify_landscape_gap(instances, size, seed, tolerance);
    if (out_json != nullptr) mebns::write_theorem_json(out_json, report);
    if (violations_out != nullptr) *violations_out = report.violations;
  });
}

} /* extern "C" */
