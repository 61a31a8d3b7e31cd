#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mebns {

// Where a training sample came from. Tracked end to end so dumps and
// statistical tests can audit sampler behavior.
enum class Provenance : std::uint8_t { positive, uniform, pns, dns, khop };

const char* provenance_name(Provenance p);
Provenance provenance_from_name(const std::string& name);

struct Sample {
  std::int64_t u = 0;
  std::int64_t v = 0;
  std::int8_t label = 0;  // 1 = edge, 0 = non-edge
  Provenance origin = Provenance::positive;

  friend bool operator==(const Sample&, const Sample&) = default;
};

using SampleSet = std::vector<Sample>;

// Builds the positive half of a training epoch from edges.
SampleSet positives_from_edges(const std::vector<struct Edge>& edges);

std::vector<std::int8_t> labels_of(const SampleSet& samples);

// Appends one epoch of samples to a CSV dump (epoch,u,v,y,provenance).
// `header` lines are written verbatim before the column row when the file
// is created.
void append_sample_csv(const std::string& path, std::int64_t epoch,
                       const SampleSet& samples,
                       const std::vector<std::string>& header);

}  // namespace mebns
