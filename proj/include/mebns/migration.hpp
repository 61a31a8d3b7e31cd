#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mebns/linalg.hpp"
#include "mebns/samples.hpp"

namespace mebns {

// Probe-set score history across training: a fixed set of (u,v,y) probes
// and, for chosen epochs, the model's scores on all of them. This is what
// post-hoc stability analysis runs on.
class ScoreLog {
 public:
  ScoreLog() = default;
  explicit ScoreLog(SampleSet probes) : probes_(std::move(probes)) {}

  const SampleSet& probes() const { return probes_; }
  const std::vector<std::int64_t>& epochs() const { return epochs_; }

  void record(std::int64_t epoch, Vector scores);
  bool has_epoch(std::int64_t epoch) const;
  const Vector& at_epoch(std::int64_t epoch) const;

  // CSV round-trip: '#'-prefixed metadata lines, then
  // epoch,sample_id,u,v,y,score rows. Scores print shortest-round-trip.
  void write_csv(const std::string& path,
                 const std::vector<std::string>& header) const;
  static ScoreLog read_csv(const std::string& path);

 private:
  SampleSet probes_;
  std::vector<std::int64_t> epochs_;
  std::vector<Vector> scores_;
};

// Class of a probe at one epoch, judged against that epoch's optimal
// decision threshold: negatives above the threshold are "hard" (the model
// is being fooled), the better-separated half of the true negatives is
// "easy", everything else is neither.
enum class SampleClass : std::uint8_t { easy, hard, neither };

std::vector<SampleClass> classify_samples(const Vector& scores,
                                          const std::vector<std::int8_t>& labels);

// Stability flag for one probe between two epochs:
//   green  - score moved less than `gap`
//   red    - moved at least `gap` AND flipped easy<->hard
//   yellow - everything else
enum class MigrationColor : std::uint8_t { green, yellow, red };

const char* migration_color_name(MigrationColor c);

struct MigrationRecord {
  std::size_t sample;
  double score_a = 0.0, score_b = 0.0;
  SampleClass class_a = SampleClass::neither;
  SampleClass class_b = SampleClass::neither;
  MigrationColor color = MigrationColor::green;
};

struct MigrationSummary {
  std::int64_t epoch_a = 0, epoch_b = 0;
  double gap_threshold = 0.3;
  std::vector<MigrationRecord> records;
  std::int64_t green = 0, yellow = 0, red = 0;

  double red_fraction() const;
};

MigrationSummary migration_matrix(const ScoreLog& log, std::int64_t epoch_a,
                                  std::int64_t epoch_b,
                                  double gap_threshold = 0.3);

void write_migration_csv(const std::string& path, const ScoreLog& log,
                         const MigrationSummary& summary,
                         const std::vector<std::string>& header);

}  // namespace mebns
