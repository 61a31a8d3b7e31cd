#include "mebns/landscape.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "mebns/error.hpp"
#include "mebns/rng.hpp"

namespace mebns {

TheoremInstance check_landscape_instance(const std::vector<double>& loss_ref,
                                         const std::vector<double>& loss_other,
                                         double tolerance) {
  if (loss_ref.size() != loss_other.size() || loss_ref.empty())
    throw Error::config("landscape instance needs two equal-length non-empty "
                        "loss vectors");

  const auto n = static_cast<double>(loss_ref.size());
  std::vector<double> u_ref(loss_ref.size()), u_other(loss_ref.size());
  double mean_ref = 0.0, mean_other = 0.0;
  for (std::size_t i = 0; i < loss_ref.size(); ++i) {
    u_ref[i] = std::exp(-loss_ref[i]);
    u_other[i] = std::exp(-loss_other[i]);
    mean_ref += u_ref[i];
    mean_other += u_other[i];
  }
  mean_ref /= n;
  mean_other /= n;

  double var = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < loss_ref.size(); ++i) {
    var += (u_ref[i] - mean_ref) * (u_ref[i] - mean_ref);
    cov += (u_ref[i] - mean_ref) * (u_other[i] - mean_other);
  }
  var /= n;
  cov /= n;

  // Reweighted objectives with p_i proportional to U*_i.
  double sum_ref = mean_ref * n;
  double rs_ref = 0.0, rs_other = 0.0;
  for (std::size_t i = 0; i < loss_ref.size(); ++i) {
    const double p = u_ref[i] / sum_ref;
    rs_ref += p * u_ref[i];
    rs_other += p * u_other[i];
  }

  TheoremInstance inst;
  inst.lhs = rs_ref - rs_other;
  inst.rhs = mean_ref - mean_other;
  inst.cov = cov;
  inst.var = var;
  inst.eligible = cov <= var;
  inst.holds = inst.lhs - inst.rhs >= -tolerance;
  return inst;
}

TheoremReport verify_landscape_gap(std::int64_t instances, std::int64_t size,
                                   std::uint64_t seed, double tolerance) {
  if (instances < 1 || size < 1)
    throw Error::config("landscape check needs positive instance count and size");

  TheoremReport report;
  report.instances = instances;
  report.size = size;
  report.seed = seed;
  report.tolerance = tolerance;
  report.details.reserve(static_cast<std::size_t>(instances));

  for (std::int64_t k = 0; k < instances; ++k) {
    Rng rng(mix_seed(seed, stream::landscape, static_cast<std::uint64_t>(k)));
    std::vector<double> loss_ref(static_cast<std::size_t>(size));
    std::vector<double> loss_other(static_cast<std::size_t>(size));
    for (auto& l : loss_ref) l = rng.uniform(0.0, 3.0);
    for (auto& l : loss_other) l = rng.uniform(0.0, 3.0);

    TheoremInstance inst =
        check_landscape_instance(loss_ref, loss_other, tolerance);
    if (!inst.eligible) {
      ++report.skipped;
    } else {
      ++report.eligible;
      if (!inst.holds) ++report.violations;
      report.max_violation =
          std::max(report.max_violation, inst.rhs - inst.lhs);
    }
    report.details.push_back(inst);
  }
  return report;
}

void write_theorem_json(const std::string& path, const TheoremReport& report) {
  nlohmann::ordered_json j;
  j["schema"] = "mebns-theorem/1";
  j["instances"] = report.instances;
  j["size"] = report.size;
  j["seed"] = report.seed;
  j["tolerance"] = report.tolerance;
  j["eligible"] = report.eligible;
  j["skipped"] = report.skipped;
  j["violations"] = report.violations;
  j["max_violation"] = report.max_violation;

  std::ofstream out(path);
  if (!out) throw Error::io("cannot open theorem report for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw Error::io("failed writing theorem report: " + path);
}

}  // namespace mebns
