#include <doctest.h>

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mebns/dataset_gen.hpp"
#include "mebns/error.hpp"
#include "mebns/pipeline.hpp"

using mebns::EpochRow;
using mebns::Graph;
using mebns::ParamStore;
using mebns::RunConfig;
using mebns::RunOptions;
using mebns::RunResult;
using mebns::Trainer;

namespace {

Graph small_graph(std::uint64_t seed = 3) {
  mebns::SynthSpec s;
  s.nodes = 150;
  s.edges = 600;
  s.feature_dim = 32;
  s.communities = 3;
  s.words_per_node = 6;
  s.words_per_community = 12;
  s.seed = seed;
  return mebns::generate_synth_graph(s);
}

RunConfig small_cfg() {
  RunConfig c;
  c.hidden = 16;
  c.embed = 8;
  c.teacher_epochs = 4;
  c.max_student_epochs = 3;
  c.meta_draws = 4;
  c.tau = 0.05;
  c.eval_pool_min = 31;
  c.delta = 0.2;
  c.seed = 11;
  return c;
}

void check_rows_equal(const EpochRow& a, const EpochRow& b) {
  CHECK(a.epoch == b.epoch);
  CHECK(a.loss == b.loss);
  CHECK(a.valid_auc == b.valid_auc);
  CHECK(a.valid_hits20 == b.valid_hits20);
}

}  // namespace

TEST_CASE("a full run numbers epochs continuously and tracks its best") {
  RunConfig cfg = small_cfg();
  cfg.score_epochs = {2, 3};
  Trainer trainer(cfg, small_graph());

  RunOptions opt;
  opt.mebns = true;
  opt.log_scores = true;
  const RunResult r = trainer.run(opt);

  // Teacher epochs 1..4, student epochs picking up at 5.
  REQUIRE(r.report.teacher_rows.size() == 4);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(r.report.teacher_rows[i].epoch == static_cast<std::int64_t>(i + 1));
  REQUIRE(r.report.student_rows.size() == 3);  // patience 20 never trips
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(r.report.student_rows[i].epoch == static_cast<std::int64_t>(i + 5));

  // Best-epoch bookkeeping matches the rows.
  double best = -1.0;
  std::int64_t best_epoch = -1;
  for (const EpochRow& row : r.report.student_rows)
    if (row.valid_auc > best) {
      best = row.valid_auc;
      best_epoch = row.epoch;
    }
  CHECK(r.report.best_student_epoch == best_epoch);
  CHECK(r.report.best_student_valid_auc == best);

  // The reported test metrics are the best student's, reproducibly.
  const mebns::TestMetrics again = trainer.evaluate(r.student);
  CHECK(r.report.test.auc == again.auc);
  CHECK(r.report.test.hits20 == again.hits20);
  CHECK(r.report.test.hits30 == again.hits30);
  CHECK(r.report.test.auc > 0.0);
  CHECK(r.report.test.auc <= 1.0);

  // Meta-data collection ran and audited the whole candidate pool.
  CHECK(r.has_uncertainty);
  CHECK(r.meta_pool.size() == 2 * trainer.split().train.size());
  CHECK(r.uncertainty.b.size() ==
        static_cast<std::int64_t>(r.meta_pool.size()));

  // One telemetry row per student iteration, k counted from 1.
  REQUIRE(r.telemetry.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(r.telemetry[i].k == static_cast<std::int64_t>(i + 1));

  // Probe scores were recorded exactly at the requested epochs.
  CHECK(r.report.score_log.epochs() == std::vector<std::int64_t>{2, 3});
  CHECK(r.report.score_log.probes().size() ==
        2 * trainer.split().train.size());

  // Timing is collected in memory but never serialized.
  CHECK(r.report.teacher_timing.epochs == 4);
  CHECK(r.report.student_timing.epochs == 3);
  const std::string dump = report_to_json(r.report).dump();
  CHECK(dump.find("timing") == std::string::npos);
  CHECK(dump.find("seconds") == std::string::npos);
}

TEST_CASE("report json round-trips and keeps its schema") {
  RunConfig cfg = small_cfg();
  Trainer trainer(cfg, small_graph());
  RunOptions opt;
  const RunResult r = trainer.run(opt);

  const auto j = mebns::report_to_json(r.report);
  CHECK(j.at("schema") == "mebns-report/1");
  CHECK(j.at("seed") == 11);
  CHECK(j.at("mebns") == true);
  CHECK(j.at("teacher").at("rows").size() == 4);
  CHECK(j.at("student").at("rows").size() == 3);

  const mebns::TrainReport back = mebns::report_from_json(j);
  CHECK(mebns::report_to_json(back).dump() == j.dump());

  auto tampered = j;
  tampered["schema"] = "mebns-report/9";
  CHECK_THROWS_AS(mebns::report_from_json(tampered), mebns::Error);

  const std::string path = "/tmp/mebns_test_report.json";
  mebns::write_report_json(path, r.report);
  std::ifstream in(path);
  const auto parsed = nlohmann::ordered_json::parse(in);
  CHECK(parsed.dump() == j.dump());
}

TEST_CASE("identical seeds reproduce runs exactly; new seeds diverge") {
  const RunConfig cfg = small_cfg();
  RunOptions opt;
  opt.mebns = true;

  Trainer t1(cfg, small_graph());
  Trainer t2(cfg, small_graph());
  const RunResult a = t1.run(opt);
  const RunResult b = t2.run(opt);

  CHECK(mebns::report_to_json(a.report).dump() ==
        mebns::report_to_json(b.report).dump());
  CHECK(a.teacher == b.teacher);
  CHECK(a.student == b.student);
  CHECK(a.meta == b.meta);

  RunConfig other = cfg;
  other.seed = 12;
  Trainer t3(other, small_graph());
  const RunResult c = t3.run(opt);
  CHECK(mebns::report_to_json(a.report).dump() !=
        mebns::report_to_json(c.report).dump());
  CHECK_FALSE(a.teacher == c.teacher);
}

TEST_CASE("teacher-only runs skip every student artifact") {
  RunConfig cfg = small_cfg();
  Trainer trainer(cfg, small_graph());
  RunOptions opt;
  opt.mebns = false;
  const RunResult r = trainer.run(opt);

  CHECK_FALSE(r.report.mebns);
  CHECK(r.report.teacher_rows.size() == 4);
  CHECK(r.report.student_rows.empty());
  CHECK(r.report.best_student_epoch == -1);
  CHECK(r.student.size() == 0);
  CHECK(r.meta.size() == 0);
  CHECK(r.telemetry.empty());
  CHECK_FALSE(r.has_uncertainty);

  // The student section disappears from the report entirely.
  const auto j = mebns::report_to_json(r.report);
  CHECK_FALSE(j.contains("student"));
  CHECK(mebns::report_to_json(mebns::report_from_json(j)).dump() == j.dump());

  // Test metrics come from the final teacher.
  const mebns::TestMetrics again = trainer.evaluate(r.teacher);
  CHECK(r.report.test.auc == again.auc);
}

TEST_CASE("a zero-epoch teacher still evaluates its initialization") {
  RunConfig cfg = small_cfg();
  cfg.teacher_epochs = 0;
  mebns::validate_config(cfg);
  Trainer trainer(cfg, small_graph());
  RunOptions opt;
  opt.mebns = false;
  const RunResult r = trainer.run(opt);
  CHECK(r.report.teacher_rows.empty());
  CHECK(r.teacher.size() > 0);
  CHECK(r.report.test.auc > 0.0);
}

TEST_CASE("a frozen unit-weight student continues the teacher bit for bit") {
  // One run trains the teacher for 5 epochs; the other hands over after 3 and
  // runs 2 frozen student epochs with a full filter quota and the same
  // mixture rate. The optimizer state, epoch seeds and updates must line up
  // so exactly that the parameter trajectories are indistinguishable.
  RunConfig continued = small_cfg();
  continued.teacher_epochs = 5;

  RunConfig handover = small_cfg();
  handover.teacher_epochs = 3;
  handover.max_student_epochs = 2;
  handover.beta = 1.0;
  handover.meta_freeze = true;

  std::map<std::int64_t, ParamStore> params_a, params_b;

  Trainer ta(continued, small_graph());
  ta.epoch_callback = [&](std::int64_t e, const ParamStore& p) {
    params_a.emplace(e, p);
  };
  RunOptions opt_a;
  opt_a.mebns = false;
  const RunResult ra = ta.run(opt_a);

  Trainer tb(handover, small_graph());
  tb.epoch_callback = [&](std::int64_t e, const ParamStore& p) {
    params_b.emplace(e, p);
  };
  RunOptions opt_b;
  opt_b.mebns = true;
  const RunResult rb = tb.run(opt_b);

  REQUIRE(params_a.size() == 5);
  REQUIRE(params_b.size() == 5);
  for (std::int64_t e = 1; e <= 5; ++e) {
    INFO("epoch ", e);
    CHECK(params_a.at(e) == params_b.at(e));
  }

  // Evaluation rows agree across the phase boundary too.
  REQUIRE(rb.report.teacher_rows.size() == 3);
  REQUIRE(rb.report.student_rows.size() == 2);
  for (std::size_t i = 0; i < 3; ++i)
    check_rows_equal(ra.report.teacher_rows[i], rb.report.teacher_rows[i]);
  for (std::size_t i = 0; i < 2; ++i)
    check_rows_equal(ra.report.teacher_rows[3 + i],
                     rb.report.student_rows[i]);

  // Frozen telemetry shows unit weights and an untouched weighting net.
  for (const mebns::TelemetryRow& row : rb.telemetry) {
    CHECK(row.info.mean_weight == 1.0);
    CHECK(row.info.meta_loss == 0.0);
    CHECK(row.info.meta_grad_norm == 0.0);
  }
  CHECK_FALSE(rb.has_uncertainty);
}

TEST_CASE("telemetry rows serialize as one json object per line") {
  RunConfig cfg = small_cfg();
  Trainer trainer(cfg, small_graph());
  RunOptions opt;
  const RunResult r = trainer.run(opt);

  const std::string path = "/tmp/mebns_test_telemetry.jsonl";
  mebns::write_telemetry_jsonl(path, r.telemetry);

  std::ifstream in(path);
  std::string line;
  std::int64_t k = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    ++k;
    CHECK(j.at("k") == k);
    CHECK(j.contains("mean_hard_loss"));
    CHECK(j.contains("mean_weight"));
    CHECK(j.contains("meta_loss"));
    CHECK(j.contains("student_grad_norm"));
    CHECK(j.contains("meta_grad_norm"));
  }
  CHECK(k == static_cast<std::int64_t>(r.telemetry.size()));
}

TEST_CASE("the split manifest inventories every edge of the split") {
  RunConfig cfg = small_cfg();
  Trainer trainer(cfg, small_graph());
  const std::string path = "/tmp/mebns_test_split.json";
  trainer.write_split_manifest(path);

  std::ifstream in(path);
  const auto j = nlohmann::ordered_json::parse(in);
  CHECK(j.at("schema") == "mebns-split/1");
  CHECK(j.at("seed") == 11);
  CHECK(j.at("num_nodes") == 150);
  CHECK(j.at("num_edges") == trainer.graph().num_edges());
  CHECK(j.at("train").size() == trainer.split().train.size());
  CHECK(j.at("valid").size() == trainer.split().valid.size());
  CHECK(j.at("test").size() == trainer.split().test.size());
  CHECK(j.at("train").size() == 420);  // 70% of 600
  CHECK(j.at("valid").size() == 60);
  CHECK(j.at("test").size() == 120);
  for (const auto& e : j.at("valid")) REQUIRE(e.size() == 2);

  // Header lines stamped into csv artifacts carry the config and seed.
  const auto header = trainer.artifact_header();
  REQUIRE(header.size() == 2);
  CHECK(header[0].rfind("# config: {", 0) == 0);
  CHECK(header[1] == "# seed: 11");
}
