#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "mebns/linalg.hpp"

namespace mebns {

// Named collection of dense parameter matrices. Iteration order is the
// insertion order, which keeps every loop over parameters deterministic.
class ParamStore {
 public:
  void add(const std::string& name, Matrix value);

  bool has(const std::string& name) const { return index_.count(name) > 0; }
  Matrix& at(const std::string& name);
  const Matrix& at(const std::string& name) const;

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  Matrix& value(std::size_t i) { return values_[i]; }
  const Matrix& value(std::size_t i) const { return values_[i]; }

  // Total number of scalar entries.
  std::int64_t scalar_count() const;

  bool same_shapes(const ParamStore& other) const;
  bool all_finite() const;

  // p += alpha * g  (shapes must match).
  void axpy(double alpha, const ParamStore& g);

  // Zero-filled copy of this store's shapes.
  ParamStore zeros_like() const;

  friend bool operator==(const ParamStore& a, const ParamStore& b);

 private:
  std::vector<std::string> names_;
  std::vector<Matrix> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Losses hand back gradients in a bundle together with the loss value they
// were taken at. Gradient shapes mirror the parameter store one-to-one.
struct GradientBundle {
  double loss = 0.0;
  ParamStore grads;

  double norm() const;
};

// Binary checkpoint with bit-exact round-trip: little-endian doubles in
// row-major order, one record per named matrix.
void save_checkpoint(const ParamStore& params, const std::string& path);
ParamStore load_checkpoint(const std::string& path);

}  // namespace mebns
