#include "mebns/samples.hpp"

#include <filesystem>
#include <fstream>

#include "mebns/error.hpp"
#include "mebns/graph.hpp"

namespace mebns {

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::positive: return "positive";
    case Provenance::uniform: return "uniform";
    case Provenance::pns: return "pns";
    case Provenance::dns: return "dns";
    case Provenance::khop: return "khop";
  }
  return "?";
}

Provenance provenance_from_name(const std::string& name) {
  if (name == "positive") return Provenance::positive;
  if (name == "uniform") return Provenance::uniform;
  if (name == "pns") return Provenance::pns;
  if (name == "dns") return Provenance::dns;
  if (name == "khop") return Provenance::khop;
  throw Error::parse("unknown provenance: '" + name + "'");
}

SampleSet positives_from_edges(const std::vector<Edge>& edges) {
  SampleSet out;
  out.reserve(edges.size());
  for (const Edge& e : edges)
    out.push_back({e.u, e.v, 1, Provenance::positive});
  return out;
}

std::vector<std::int8_t> labels_of(const SampleSet& samples) {
  std::vector<std::int8_t> y;
  y.reserve(samples.size());
  for (const Sample& s : samples) y.push_back(s.label);
  return y;
}

void append_sample_csv(const std::string& path, std::int64_t epoch,
                       const SampleSet& samples,
                       const std::vector<std::string>& header) {
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error::io("cannot open sample dump for writing: " + path);
  if (fresh) {
    for (const auto& h : header) out << h << "\n";
    out << "epoch,u,v,y,provenance\n";
  }
  for (const Sample& s : samples)
    out << epoch << ',' << s.u << ',' << s.v << ','
        << static_cast<int>(s.label) << ',' << provenance_name(s.origin)
        << "\n";
  if (!out) throw Error::io("failed writing sample dump: " + path);
}

}  // namespace mebns
