#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mebns {

// Numeric check of the reweighted-landscape gap guarantee.
//
// For per-sample losses L* (at a reference optimum) and L (anywhere else),
// write the utilities U* = exp(-L*), U = exp(-L). The plain objective is
// the average utility R_t = mean(U); the reweighted one puts probability
// p_i proportional to U*_i on sample i, R_s = sum_i p_i U_i. Expanding:
//
//   R_s(theta)  = R_t(theta)  + Cov(U*, U)  / mean(U*)
//   R_s(theta*) = R_t(theta*) + Var(U*)     / mean(U*)
//
// so the reweighted improvement dominates the plain improvement,
//
//   R_s(theta*) - R_s(theta) >= R_t(theta*) - R_t(theta),
//
// exactly when Cov(U*, U) <= Var(U*). Instances violating that premise are
// counted as skipped, not as failures.
struct TheoremInstance {
  double lhs = 0.0;  // reweighted improvement
  double rhs = 0.0;  // plain improvement
  double cov = 0.0;  // population covariance of (U*, U)
  double var = 0.0;  // population variance of U*
  bool eligible = false;
  bool holds = false;
};

struct TheoremReport {
  std::int64_t instances = 0;
  std::int64_t size = 0;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  std::int64_t eligible = 0;
  std::int64_t skipped = 0;
  std::int64_t violations = 0;
  double max_violation = 0.0;  // worst rhs - lhs over eligible instances
  std::vector<TheoremInstance> details;
};

// Draws `instances` random loss vectors of length `size` (losses uniform in
// [0,3]) and checks the inequality on each.
TheoremReport verify_landscape_gap(std::int64_t instances, std::int64_t size,
                                   std::uint64_t seed,
                                   double tolerance = 1e-9);

// Checks one explicit instance.
TheoremInstance check_landscape_instance(const std::vector<double>& loss_ref,
                                         const std::vector<double>& loss_other,
                                         double tolerance = 1e-9);

void write_theorem_json(const std::string& path, const TheoremReport& report);

}  // namespace mebns
