#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mebns/bilevel.hpp"
#include "mebns/config.hpp"
#include "mebns/distill.hpp"
#include "mebns/graph.hpp"
#include "mebns/migration.hpp"
#include "mebns/samplers.hpp"

namespace mebns {

struct EpochRow {
  std::int64_t epoch = 0;  // global epoch number, continuous across phases
  double loss = 0.0;
  double valid_auc = 0.0;
  double valid_hits20 = 0.0;
};

struct TestMetrics {
  double auc = 0.0;
  double hits20 = 0.0;
  double hits30 = 0.0;
};

// Wall-clock bookkeeping. Collected in memory and printed on demand; never
// serialized into report files, which must be byte-identical across reruns.
struct PhaseTiming {
  double seconds = 0.0;
  std::int64_t epochs = 0;

  double per_epoch() const {
    return epochs > 0 ? seconds / static_cast<double>(epochs) : 0.0;
  }
};

struct TrainReport {
  nlohmann::ordered_json config;
  std::uint64_t seed = 0;
  bool mebns = false;
  std::vector<EpochRow> teacher_rows;
  std::vector<EpochRow> student_rows;
  std::int64_t best_student_epoch = -1;
  double best_student_valid_auc = 0.0;
  TestMetrics test;

  // In-memory extras (not part of the JSON artifact).
  PhaseTiming teacher_timing;
  PhaseTiming student_timing;
  ScoreLog score_log;
};

nlohmann::ordered_json report_to_json(const TrainReport& report);
TrainReport report_from_json(const nlohmann::ordered_json& j);
void write_report_json(const std::string& path, const TrainReport& report);

// Per-iteration telemetry row of the student loop.
struct TelemetryRow {
  std::int64_t k = 0;  // student iteration, 1-based
  BilevelStepInfo info;
};

void write_telemetry_jsonl(const std::string& path,
                           const std::vector<TelemetryRow>& rows);

struct RunResult {
  TrainReport report;
  ParamStore teacher;          // final teacher parameters
  ParamStore student;          // best-validation student (empty if no student)
  ParamStore meta;             // final weighting-net parameters (may be empty)
  std::vector<TelemetryRow> telemetry;

  // Meta-data collection audit trail (present when the student phase ran
  // with an active weighting net).
  bool has_uncertainty = false;
  SampleSet meta_pool;
  UncertaintyTable uncertainty;
};

struct RunOptions {
  bool mebns = true;
  bool log_scores = false;
  bool verbose = false;
  std::string dump_samples_path;  // empty: no per-epoch sample dump
};

// One experiment: owns the dataset, the split, the evaluation pools, and
// the probe set, and drives the two training phases.
class Trainer {
 public:
  explicit Trainer(const RunConfig& cfg);       // loads from cfg's data paths
  Trainer(const RunConfig& cfg, Graph graph);   // graph already in memory

  RunResult run(const RunOptions& options);

  // Test metrics of arbitrary parameters (e.g. a loaded checkpoint).
  TestMetrics evaluate(const ParamStore& params) const;

  void write_split_manifest(const std::string& path) const;

  const Graph& graph() const { return graph_; }
  const EdgeSplit& split() const { return split_; }
  const RunConfig& config() const { return cfg_; }

  // Metadata lines ('# ...') stamped into every CSV artifact of this run.
  std::vector<std::string> artifact_header() const;

  // Test hook: observes the committed parameters after every epoch.
  std::function<void(std::int64_t, const ParamStore&)> epoch_callback;

 private:
  struct EvalPools {
    SampleSet valid_pos, valid_auc_negs, valid_hits_negs;
    SampleSet test_pos, test_auc_negs, test_hits_negs;
  };

  void init();
  SampleSet draw_pool(std::size_t count, std::uint64_t tag) const;
  SampleSet epoch_samples(const ParamStore& params, std::int64_t global_epoch,
                          double delta) const;
  EpochRow eval_epoch(std::int64_t global_epoch, const ParamStore& params,
                      double loss, const RunOptions& options,
                      ScoreLog& log) const;

  RunConfig cfg_;
  Graph graph_;
  EdgeSplit split_;
  NormAdjacency adj_;
  SampleSet positives_;
  KHopCache khop_;
  EvalPools pools_;
  SampleSet probes_;
};

}  // namespace mebns
