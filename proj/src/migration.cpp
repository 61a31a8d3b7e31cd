#include "mebns/migration.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

#include "mebns/error.hpp"
#include "mebns/metrics.hpp"

namespace mebns {

void ScoreLog::record(std::int64_t epoch, Vector scores) {
  if (scores.size() != static_cast<std::int64_t>(probes_.size()))
    throw Error::runtime("score log: score vector does not match probe count");
  if (has_epoch(epoch))
    throw Error::runtime("score log: epoch " + std::to_string(epoch) +
                         " recorded twice");
  epochs_.push_back(epoch);
  scores_.push_back(std::move(scores));
}

bool ScoreLog::has_epoch(std::int64_t epoch) const {
  return std::find(epochs_.begin(), epochs_.end(), epoch) != epochs_.end();
}

const Vector& ScoreLog::at_epoch(std::int64_t epoch) const {
  for (std::size_t i = 0; i < epochs_.size(); ++i)
    if (epochs_[i] == epoch) return scores_[i];
  throw Error::runtime("score log has no epoch " + std::to_string(epoch));
}

namespace {

std::string format_double(double d) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  return std::string(buf, ptr);
}

}  // namespace

void ScoreLog::write_csv(const std::string& path,
                         const std::vector<std::string>& header) const {
  std::ofstream out(path);
  if (!out) throw Error::io("cannot open score log for writing: " + path);
  for (const auto& h : header) out << h << "\n";
  out << "epoch,sample_id,u,v,y,score\n";
  for (std::size_t e = 0; e < epochs_.size(); ++e)
    for (std::size_t i = 0; i < probes_.size(); ++i)
      out << epochs_[e] << ',' << i << ',' << probes_[i].u << ','
          << probes_[i].v << ',' << static_cast<int>(probes_[i].label) << ','
          << format_double(scores_[e][static_cast<std::int64_t>(i)]) << "\n";
  if (!out) throw Error::io("failed writing score log: " + path);
}

ScoreLog ScoreLog::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error::io("cannot open score log: " + path);

  SampleSet probes;
  std::map<std::int64_t, std::vector<std::pair<std::size_t, double>>> by_epoch;
  std::string line;
  std::int64_t lineno = 0;
  bool saw_columns = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!saw_columns) {  // column row
      saw_columns = true;
      continue;
    }
    const std::string where = path + ":" + std::to_string(lineno);
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i)
      if (i == line.size() || line[i] == ',') {
        fields.emplace_back(line.data() + start, i - start);
        start = i + 1;
      }
    if (fields.size() != 6)
      throw Error::parse(where + ": expected 6 fields, got " +
                         std::to_string(fields.size()));
    auto to_i64 = [&](std::string_view s) {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size())
        throw Error::parse(where + ": bad integer '" + std::string(s) + "'");
      return v;
    };
    auto to_f64 = [&](std::string_view s) {
      double v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size())
        throw Error::parse(where + ": bad number '" + std::string(s) + "'");
      return v;
    };
    const std::int64_t epoch = to_i64(fields[0]);
    const auto id = static_cast<std::size_t>(to_i64(fields[1]));
    const Sample s{to_i64(fields[2]), to_i64(fields[3]),
                   static_cast<std::int8_t>(to_i64(fields[4])),
                   Provenance::positive};
    if (id == probes.size())
      probes.push_back(s);
    else if (id < probes.size()) {
      if (probes[id].u != s.u || probes[id].v != s.v ||
          probes[id].label != s.label)
        throw Error::parse(where + ": probe " + std::to_string(id) +
                           " changes identity between epochs");
    } else {
      throw Error::parse(where + ": sample ids must be dense from 0");
    }
    by_epoch[epoch].emplace_back(id, to_f64(fields[5]));
  }
  if (probes.empty()) throw Error::parse(path + ": no score rows");

  ScoreLog log(std::move(probes));
  for (auto& [epoch, rows] : by_epoch) {
    if (rows.size() != log.probes().size())
      throw Error::parse(path + ": epoch " + std::to_string(epoch) +
                         " is missing probes");
    Vector v(static_cast<std::int64_t>(rows.size()));
    for (auto& [id, score] : rows) v[static_cast<std::int64_t>(id)] = score;
    log.record(epoch, std::move(v));
  }
  return log;
}

std::vector<SampleClass> classify_samples(
    const Vector& scores, const std::vector<std::int8_t>& labels) {
  if (scores.size() != static_cast<std::int64_t>(labels.size()))
    throw Error::runtime("classify: scores and labels differ in length");

  std::vector<double> score_vec(scores.data(), scores.data() + scores.size());
  const double threshold = roc_optimal_threshold(score_vec, labels);

  std::vector<SampleClass> out(labels.size(), SampleClass::neither);
  std::vector<std::size_t> true_negatives;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0) continue;
    const double s = scores[static_cast<std::int64_t>(i)];
    if (s > threshold)
      out[i] = SampleClass::hard;  // negative the model rates as an edge
    else
      true_negatives.push_back(i);
  }

  // The better-separated (lowest-scoring) half of the correctly rejected
  // negatives counts as easy; ties break on index for determinism.
  std::sort(true_negatives.begin(), true_negatives.end(),
            [&](std::size_t a, std::size_t b) {
              const double sa = scores[static_cast<std::int64_t>(a)];
              const double sb = scores[static_cast<std::int64_t>(b)];
              if (sa != sb) return sa < sb;
              return a < b;
            });
  const std::size_t easy_count = true_negatives.size() / 2;
  for (std::size_t i = 0; i < easy_count; ++i)
    out[true_negatives[i]] = SampleClass::easy;
  return out;
}

const char* migration_color_name(MigrationColor c) {
  switch (c) {
    case MigrationColor::green: return "green";
    case MigrationColor::yellow: return "yellow";
    case MigrationColor::red: return "red";
  }
  return "?";
}

double MigrationSummary::red_fraction() const {
  const auto total = static_cast<double>(records.size());
  return total > 0 ? static_cast<double>(red) / total : 0.0;
}

MigrationSummary migration_matrix(const ScoreLog& log, std::int64_t epoch_a,
                                  std::int64_t epoch_b, double gap_threshold) {
  if (!(gap_threshold > 0.0))
    throw Error::config("migration gap threshold must be > 0");
  const Vector& sa = log.at_epoch(epoch_a);
  const Vector& sb = log.at_epoch(epoch_b);
  const auto labels = labels_of(log.probes());
  const auto ca = classify_samples(sa, labels);
  const auto cb = classify_samples(sb, labels);

  MigrationSummary m;
  m.epoch_a = epoch_a;
  m.epoch_b = epoch_b;
  m.gap_threshold = gap_threshold;
  m.records.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    MigrationRecord r;
    r.sample = i;
    r.score_a = sa[static_cast<std::int64_t>(i)];
    r.score_b = sb[static_cast<std::int64_t>(i)];
    r.class_a = ca[i];
    r.class_b = cb[i];
    const double gap = std::abs(r.score_b - r.score_a);
    const bool flipped =
        (r.class_a == SampleClass::easy && r.class_b == SampleClass::hard) ||
        (r.class_a == SampleClass::hard && r.class_b == SampleClass::easy);
    if (gap < gap_threshold)
      r.color = MigrationColor::green;
    else if (flipped)
      r.color = MigrationColor::red;
    else
      r.color = MigrationColor::yellow;
    switch (r.color) {
      case MigrationColor::green: ++m.green; break;
      case MigrationColor::yellow: ++m.yellow; break;
      case MigrationColor::red: ++m.red; break;
    }
    m.records.push_back(r);
  }
  return m;
}

void write_migration_csv(const std::string& path, const ScoreLog& log,
                         const MigrationSummary& summary,
                         const std::vector<std::string>& header) {
  (void)log;
  std::ofstream out(path);
  if (!out) throw Error::io("cannot open migration csv for writing: " + path);
  for (const auto& h : header) out << h << "\n";
  out << "sample_id,score_a,score_b,color\n";
  for (const MigrationRecord& r : summary.records)
    out << r.sample << ',' << format_double(r.score_a) << ','
        << format_double(r.score_b) << ',' << migration_color_name(r.color)
        << "\n";
  if (!out) throw Error::io("failed writing migration csv: " + path);
}

}  // namespace mebns
