#include "mebns/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <unordered_set>

#include "mebns/error.hpp"
#include "mebns/gcn.hpp"
#include "mebns/grad.hpp"
#include "mebns/meta_net.hpp"
#include "mebns/metrics.hpp"
#include "mebns/rng.hpp"

namespace mebns {

namespace {

std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch())
      .count();
}

}  // namespace

Trainer::Trainer(const RunConfig& cfg)
    : cfg_(cfg),
      graph_(load_graph(cfg.edges, cfg.features, cfg.num_nodes,
                        cfg.onehot_dim)),
      split_(split_edges(graph_, cfg.seed)),
      adj_(NormAdjacency::build(split_.message_graph)),
      positives_(positives_from_edges(split_.train)),
      khop_(graph_, split_.message_graph, cfg.khops) {
  init();
}

Trainer::Trainer(const RunConfig& cfg, Graph graph)
    : cfg_(cfg),
      graph_(std::move(graph)),
      split_(split_edges(graph_, cfg.seed)),
      adj_(NormAdjacency::build(split_.message_graph)),
      positives_(positives_from_edges(split_.train)),
      khop_(graph_, split_.message_graph, cfg.khops) {
  init();
}

void Trainer::init() {
  validate_config(cfg_);
  if (graph_.feature_dim() <= 0)
    throw Error::config("graph has no features and no one-hot fallback");

  pools_.valid_pos = positives_from_edges(split_.valid);
  pools_.test_pos = positives_from_edges(split_.test);
  pools_.valid_auc_negs =
      draw_pool(split_.valid.size(), stream::valid_auc_pool);
  pools_.test_auc_negs = draw_pool(split_.test.size(), stream::test_auc_pool);
  const auto hits_floor = static_cast<std::size_t>(cfg_.eval_pool_min);
  pools_.valid_hits_negs = draw_pool(
      std::max(hits_floor, split_.valid.size()), stream::valid_hits_pool);
  pools_.test_hits_negs = draw_pool(
      std::max(hits_floor, split_.test.size()), stream::test_hits_pool);

  // Probe set: the train positives plus one fixed seeded negative per
  // positive. Frozen for the whole run, so scores at different epochs are
  // comparable sample-by-sample.
  probes_ = positives_;
  const SampleSet probe_negs = sample_uniform(
      graph_, positives_, mix_seed(cfg_.seed, stream::probe_negatives));
  probes_.insert(probes_.end(), probe_negs.begin(), probe_negs.end());
}

SampleSet Trainer::draw_pool(std::size_t count, std::uint64_t tag) const {
  Rng rng(mix_seed(cfg_.seed, tag));
  const auto n = static_cast<std::size_t>(graph_.num_nodes());
  std::unordered_set<std::uint64_t> used;
  SampleSet out;
  out.reserve(count);
  std::size_t attempts = 0;
  const std::size_t max_attempts = 1000 * (count + 1);
  while (out.size() < count) {
    if (++attempts > max_attempts)
      throw Error::runtime(
          "could not draw enough distinct non-edges for an evaluation pool");
    const auto u = static_cast<std::int64_t>(rng.index(n));
    const auto v = static_cast<std::int64_t>(rng.index(n));
    if (u == v || graph_.has_edge(u, v)) continue;
    const auto a = static_cast<std::uint64_t>(std::min(u, v));
    const auto b = static_cast<std::uint64_t>(std::max(u, v));
    const std::uint64_t key = a * static_cast<std::uint64_t>(n) + b;
    if (used.count(key)) continue;
    used.insert(key);
    out.push_back({u, v, 0, Provenance::uniform});
  }
  return out;
}

SampleSet Trainer::epoch_samples(const ParamStore& params,
                                 std::int64_t global_epoch,
                                 double delta) const {
  SamplerConfig sc;
  sc.kind = sampler_kind_from_name(cfg_.kind);
  sc.delta = delta;
  sc.khops = cfg_.khops;
  sc.dns_pool = cfg_.dns_pool;
  sc.pns_exponent = cfg_.pns_exponent;

  PairScorer scorer;
  if (sc.kind == SamplerKind::dns) {
    Matrix emb = encode(adj_, graph_.features(), params);
    scorer = [emb = std::move(emb)](std::int64_t u, std::int64_t v) {
      return 1.0 / (1.0 + std::exp(-emb.row(u).dot(emb.row(v))));
    };
  }

  const SampleSet negs = std_generate(
      graph_, split_.message_graph, positives_, sc, scorer, khop_,
      mix_seed(cfg_.seed, stream::epoch_negatives,
               static_cast<std::uint64_t>(global_epoch)));

  SampleSet epoch = positives_;
  epoch.insert(epoch.end(), negs.begin(), negs.end());
  return epoch;
}

EpochRow Trainer::eval_epoch(std::int64_t global_epoch,
                             const ParamStore& params, double loss,
                             const RunOptions& options, ScoreLog& log) const {
  Matrix emb = encode(adj_, graph_.features(), params);

  EpochRow row;
  row.epoch = global_epoch;
  row.loss = loss;
  row.valid_auc = auc(to_std(score_pairs(emb, pools_.valid_pos)),
                      to_std(score_pairs(emb, pools_.valid_auc_negs)));
  row.valid_hits20 = hits_at_k(to_std(score_pairs(emb, pools_.valid_pos)),
                               to_std(score_pairs(emb, pools_.valid_hits_negs)),
                               20);

  if (options.log_scores) {
    const bool listed = !cfg_.score_epochs.empty() &&
                        std::find(cfg_.score_epochs.begin(),
                                  cfg_.score_epochs.end(),
                                  global_epoch) != cfg_.score_epochs.end();
    const bool by_default =
        cfg_.score_epochs.empty() && global_epoch % 25 == 0;
    if (listed || by_default)
      log.record(global_epoch, score_pairs(emb, probes_));
  }
  return row;
}

TestMetrics Trainer::evaluate(const ParamStore& params) const {
  Matrix emb = encode(adj_, graph_.features(), params);
  TestMetrics t;
  const auto pos = to_std(score_pairs(emb, pools_.test_pos));
  t.auc = auc(pos, to_std(score_pairs(emb, pools_.test_auc_negs)));
  const auto pool = to_std(score_pairs(emb, pools_.test_hits_negs));
  t.hits20 = hits_at_k(pos, pool, 20);
  t.hits30 = hits_at_k(pos, pool, 30);
  return t;
}

RunResult Trainer::run(const RunOptions& options) {
  RunResult result;
  TrainReport& report = result.report;
  report.config = config_to_json(cfg_);
  report.seed = cfg_.seed;
  report.mebns = options.mebns;
  report.score_log = ScoreLog(probes_);

  const std::vector<std::string> dump_header = artifact_header();
  const GcnDims dims{graph_.feature_dim(), cfg_.hidden, cfg_.embed};
  ParamStore theta =
      init_gcn_params(dims, mix_seed(cfg_.seed, stream::teacher_init));
  Optimizer opt = Optimizer::adam(cfg_.teacher_lr);

  // ---- teacher phase -------------------------------------------------
  const double teacher_delta = cfg_.effective_teacher_delta();
  for (std::int64_t e = 1; e <= cfg_.teacher_epochs; ++e) {
    const double t0 = now_seconds();
    SampleSet epoch = epoch_samples(theta, e, teacher_delta);
    if (!options.dump_samples_path.empty())
      append_sample_csv(options.dump_samples_path, e, epoch, dump_header);
    GradientBundle bundle;
    try {
      bundle = backward_gradients(
          LinkLoss(adj_, graph_.features(), epoch), theta);
    } catch (const Error& err) {
      throw Error(err.kind(), "teacher epoch " + std::to_string(e) + ": " +
                                  err.what());
    }
    opt.apply_update(theta, bundle);
    EpochRow row = eval_epoch(e, theta, bundle.loss, options,
                              report.score_log);
    report.teacher_rows.push_back(row);
    report.teacher_timing.seconds += now_seconds() - t0;
    ++report.teacher_timing.epochs;
    if (epoch_callback) epoch_callback(e, theta);
    if (options.verbose && (e % 10 == 0 || e == cfg_.teacher_epochs))
      std::cout << "[teacher] epoch " << e << "/" << cfg_.teacher_epochs
                << "  loss " << row.loss << "  valid_auc " << row.valid_auc
                << "\n";
  }
  result.teacher = theta;

  if (!options.mebns) {
    report.test = evaluate(theta);
    if (options.verbose)
      std::cout << "[test] auc " << report.test.auc << "  hits@20 "
                << report.test.hits20 << "  hits@30 " << report.test.hits30
                << "\n";
    return result;
  }

  // ---- student initialization ----------------------------------------
  // The student starts from the teacher: same parameters, and the same
  // optimizer state so the phase boundary is seamless.
  BilevelState state;
  state.student = theta;
  state.delta =
      init_meta_params(mix_seed(cfg_.seed, stream::meta_init), cfg_.meta_hidden);
  state.outer_opt = opt;
  state.outer_opt.set_learning_rate(cfg_.outer_lr);
  state.meta_opt = Optimizer::sgd(cfg_.meta_lr);
  state.inner_lr = cfg_.inner_lr;

  // Teacher embeddings score the filter; frozen for the whole phase.
  const Matrix teacher_emb = encode(adj_, graph_.features(), theta);

  // Meta set: collected once, before the loop, by prediction stability
  // under edge-dropping augmentation. Skipped entirely under a frozen
  // weighting net (the meta set would never be consulted).
  SampleSet meta_set;
  if (!cfg_.meta_freeze) {
    SamplerConfig sc;
    sc.kind = sampler_kind_from_name(cfg_.kind);
    sc.delta = cfg_.effective_student_delta();
    sc.khops = cfg_.khops;
    sc.dns_pool = cfg_.dns_pool;
    sc.pns_exponent = cfg_.pns_exponent;
    PairScorer scorer;
    if (sc.kind == SamplerKind::dns) {
      scorer = [&teacher_emb](std::int64_t u, std::int64_t v) {
        return 1.0 /
               (1.0 + std::exp(-teacher_emb.row(u).dot(teacher_emb.row(v))));
      };
    }
    result.meta_pool = positives_;
    const SampleSet negs =
        std_generate(graph_, split_.message_graph, positives_, sc, scorer,
                     khop_, mix_seed(cfg_.seed, stream::meta_pool));
    result.meta_pool.insert(result.meta_pool.end(), negs.begin(), negs.end());

    result.uncertainty = estimate_uncertainty(
        theta, split_.message_graph, result.meta_pool, cfg_.meta_draws,
        cfg_.seed);
    result.has_uncertainty = true;
    const auto meta_idx = collect_meta_indices(result.uncertainty, cfg_.tau);
    meta_set = select_samples(result.meta_pool, meta_idx);
    if (options.verbose)
      std::cout << "[student] meta set: " << meta_set.size() << " of "
                << result.meta_pool.size() << " candidates below tau\n";
  } else {
    meta_set = positives_;  // placeholder; never consulted when frozen
  }

  // ---- student loop ----------------------------------------------------
  const double student_delta = cfg_.effective_student_delta();
  const FilterScope scope = filter_scope_from_name(cfg_.filter_scope);
  ParamStore best_params = state.student;
  double best_auc = -1.0;
  std::int64_t best_k = 0, best_global = cfg_.teacher_epochs;

  for (std::int64_t k = 1; k <= cfg_.max_student_epochs; ++k) {
    const std::int64_t global_epoch = cfg_.teacher_epochs + k;
    const double t0 = now_seconds();

    SampleSet epoch = epoch_samples(state.student, global_epoch, student_delta);
    const Vector teacher_scores = score_pairs(teacher_emb, epoch);
    FilterResult filtered;
    try {
      filtered = filter_hard(epoch, teacher_scores, cfg_.beta, scope);
    } catch (const Error& err) {
      throw Error(err.kind(), "student epoch " + std::to_string(k) + ": " +
                                  err.what());
    }
    const SampleSet hard = select_samples(epoch, filtered.kept);
    if (!options.dump_samples_path.empty())
      append_sample_csv(options.dump_samples_path, global_epoch, hard,
                        dump_header);

    GcnBilevelProblem problem(adj_, graph_.features(), hard, meta_set);
    BilevelStepInfo info;
    try {
      info = bilevel_iteration(state, problem, cfg_.meta_freeze);
    } catch (const Error& err) {
      throw Error(err.kind(), "student epoch " + std::to_string(k) + ": " +
                                  err.what());
    }
    result.telemetry.push_back({k, info});

    EpochRow row = eval_epoch(global_epoch, state.student,
                              info.mean_hard_loss, options, report.score_log);
    report.student_rows.push_back(row);
    report.student_timing.seconds += now_seconds() - t0;
    ++report.student_timing.epochs;
    if (epoch_callback) epoch_callback(global_epoch, state.student);

    if (row.valid_auc > best_auc) {
      best_auc = row.valid_auc;
      best_params = state.student;
      best_k = k;
      best_global = global_epoch;
    }
    if (options.verbose && (k % 10 == 0 || k == cfg_.max_student_epochs))
      std::cout << "[student] epoch " << k << " (global " << global_epoch
                << ")  loss " << row.loss << "  valid_auc " << row.valid_auc
                << "  mean_weight " << info.mean_weight << "\n";

    if (k >= cfg_.min_student_epochs && k - best_k >= cfg_.patience) {
      if (options.verbose)
        std::cout << "[student] early stop at epoch " << k
                  << " (best valid_auc " << best_auc << " at epoch " << best_k
                  << ")\n";
      break;
    }
  }

  result.student = best_params;
  result.meta = state.delta;
  report.best_student_epoch = best_global;
  report.best_student_valid_auc = best_auc;
  report.test = evaluate(best_params);
  if (options.verbose)
    std::cout << "[test] auc " << report.test.auc << "  hits@20 "
              << report.test.hits20 << "  hits@30 " << report.test.hits30
              << "\n";
  return result;
}

std::vector<std::string> Trainer::artifact_header() const {
  return {"# config: " + config_to_json(cfg_).dump(),
          "# seed: " + std::to_string(cfg_.seed)};
}

void Trainer::write_split_manifest(const std::string& path) const {
  nlohmann::ordered_json j;
  j["schema"] = "mebns-split/1";
  j["config"] = config_to_json(cfg_);
  j["seed"] = cfg_.seed;
  j["num_nodes"] = graph_.num_nodes();
  j["num_edges"] = graph_.num_edges();
  auto edges_json = [](const std::vector<Edge>& edges) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const Edge& e : edges) a.push_back({e.u, e.v});
    return a;
  };
  j["train"] = edges_json(split_.train);
  j["valid"] = edges_json(split_.valid);
  j["test"] = edges_json(split_.test);

  std::ofstream out(path);
  if (!out) throw Error::io("cannot open split manifest for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw Error::io("failed writing split manifest: " + path);
}

namespace {

nlohmann::ordered_json rows_to_json(const std::vector<EpochRow>& rows) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (const EpochRow& r : rows)
    a.push_back({{"epoch", r.epoch},
                 {"loss", r.loss},
                 {"valid_auc", r.valid_auc},
                 {"valid_hits20", r.valid_hits20}});
  return a;
}

std::vector<EpochRow> rows_from_json(const nlohmann::ordered_json& a) {
  std::vector<EpochRow> rows;
  for (const auto& r : a)
    rows.push_back({r.at("epoch").get<std::int64_t>(),
                    r.at("loss").get<double>(),
                    r.at("valid_auc").get<double>(),
                    r.at("valid_hits20").get<double>()});
  return rows;
}

}  // namespace

nlohmann::ordered_json report_to_json(const TrainReport& report) {
  nlohmann::ordered_json j;
  j["schema"] = "mebns-report/1";
  j["config"] = report.config;
  j["seed"] = report.seed;
  j["mebns"] = report.mebns;
  j["teacher"] = {{"epochs", report.teacher_rows.size()},
                  {"rows", rows_to_json(report.teacher_rows)}};
  if (report.mebns)
    j["student"] = {{"epochs", report.student_rows.size()},
                    {"rows", rows_to_json(report.student_rows)},
                    {"best_epoch", report.best_student_epoch},
                    {"best_valid_auc", report.best_student_valid_auc}};
  j["test"] = {{"auc", report.test.auc},
               {"hits20", report.test.hits20},
               {"hits30", report.test.hits30}};
  return j;
}

TrainReport report_from_json(const nlohmann::ordered_json& j) {
  if (j.at("schema").get<std::string>() != "mebns-report/1")
    throw Error::parse("unexpected report schema: " +
                       j.at("schema").get<std::string>());
  TrainReport r;
  r.config = j.at("config");
  r.seed = j.at("seed").get<std::uint64_t>();
  r.mebns = j.at("mebns").get<bool>();
  r.teacher_rows = rows_from_json(j.at("teacher").at("rows"));
  if (r.mebns) {
    r.student_rows = rows_from_json(j.at("student").at("rows"));
    r.best_student_epoch = j.at("student").at("best_epoch").get<std::int64_t>();
    r.best_student_valid_auc =
        j.at("student").at("best_valid_auc").get<double>();
  }
  r.test.auc = j.at("test").at("auc").get<double>();
  r.test.hits20 = j.at("test").at("hits20").get<double>();
  r.test.hits30 = j.at("test").at("hits30").get<double>();
  return r;
}

void write_report_json(const std::string& path, const TrainReport& report) {
  std::ofstream out(path);
  if (!out) throw Error::io("cannot open report for writing: " + path);
  out << report_to_json(report).dump(2) << "\n";
  if (!out) throw Error::io("failed writing report: " + path);
}

void write_telemetry_jsonl(const std::string& path,
                           const std::vector<TelemetryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error::io("cannot open telemetry for writing: " + path);
  for (const TelemetryRow& r : rows) {
    nlohmann::ordered_json j;
    j["k"] = r.k;
    j["mean_hard_loss"] = r.info.mean_hard_loss;
    j["mean_weight"] = r.info.mean_weight;
    j["meta_loss"] = r.info.meta_loss;
    j["student_grad_norm"] = r.info.student_grad_norm;
    j["meta_grad_norm"] = r.info.meta_grad_norm;
    out << j.dump() << "\n";
  }
  if (!out) throw Error::io("failed writing telemetry: " + path);
}

}  // namespace mebns
