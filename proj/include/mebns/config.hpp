#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace mebns {

// Every knob a run reads, parsed from a key=value text file with dotted
// keys ('#' comment lines allowed). Flags override file values; defaults
// apply to absent keys; unknown keys are errors.
struct RunConfig {
  // data
  std::string edges;             // edge list TSV
  std::string features;          // feature CSV; "" selects one-hot fallback
  std::int64_t num_nodes = -1;   // -1: infer from the files
  std::int64_t onehot_dim = 0;   // 0: one-hot width = node count

  // model
  std::int64_t hidden = 128;
  std::int64_t embed = 64;

  // sampler
  std::string kind = "uniform";
  double delta = 0.05;
  double teacher_delta = -1.0;  // -1: inherit sampler.delta
  double student_delta = -1.0;  // -1: inherit sampler.delta
  int khops = 3;
  int dns_pool = 8;
  double pns_exponent = 0.75;

  // teacher
  std::int64_t teacher_epochs = 100;
  double teacher_lr = 0.01;

  // student
  std::int64_t max_student_epochs = 500;
  std::int64_t min_student_epochs = 0;
  std::int64_t patience = 20;
  double outer_lr = 0.01;
  double inner_lr = 0.01;
  double meta_lr = 0.01;

  // filter
  double beta = 0.5;
  std::string filter_scope = "all";

  // meta
  double tau = 2e-5;
  int meta_draws = 20;
  bool meta_freeze = false;
  std::int64_t meta_hidden = 64;

  // eval
  std::int64_t eval_pool_min = 1000;

  // log
  std::vector<std::int64_t> score_epochs;

  // run
  std::uint64_t seed = 1;

  double effective_teacher_delta() const {
    return teacher_delta < 0.0 ? delta : teacher_delta;
  }
  double effective_student_delta() const {
    return student_delta < 0.0 ? delta : student_delta;
  }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Parses a config file; applies defaults for absent keys and validates.
RunConfig parse_config(const std::string& path);

// Applies one "key=value" or ("key", "value") override in place.
// Does not re-validate; call validate_config afterwards.
void apply_config_override(RunConfig& cfg, const std::string& key,
                           const std::string& value);

// Range checks with actionable messages.
void validate_config(const RunConfig& cfg);

// Round-trippable key=value text with every key stated explicitly.
std::string config_to_text(const RunConfig& cfg);

// Parses config text (same grammar as the file form).
RunConfig parse_config_text(const std::string& text, const std::string& origin);

// Stable-key-order JSON object embedded into every artifact.
nlohmann::ordered_json config_to_json(const RunConfig& cfg);

}  // namespace mebns
