#include "mebns/params.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "mebns/error.hpp"

namespace mebns {

void ParamStore::add(const std::string& name, Matrix value) {
  if (has(name)) throw Error::runtime("duplicate parameter name: " + name);
  index_[name] = names_.size();
  names_.push_back(name);
  values_.push_back(std::move(value));
}

Matrix& ParamStore::at(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end())
    throw Error::runtime("unknown parameter: " + name);
  return values_[it->second];
}

const Matrix& ParamStore::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end())
    throw Error::runtime("unknown parameter: " + name);
  return values_[it->second];
}

std::int64_t ParamStore::scalar_count() const {
  std::int64_t n = 0;
  for (const Matrix& m : values_) n += m.size();
  return n;
}

bool ParamStore::same_shapes(const ParamStore& other) const {
  if (names_ != other.names_) return false;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i].rows() != other.values_[i].rows() ||
        values_[i].cols() != other.values_[i].cols())
      return false;
  return true;
}

bool ParamStore::all_finite() const {
  for (const Matrix& m : values_)
    if (!m.allFinite()) return false;
  return true;
}

void ParamStore::axpy(double alpha, const ParamStore& g) {
  if (!same_shapes(g))
    throw Error::runtime("parameter/gradient shape mismatch in axpy");
  for (std::size_t i = 0; i < values_.size(); ++i)
    values_[i] += alpha * g.values_[i];
}

ParamStore ParamStore::zeros_like() const {
  ParamStore z;
  for (std::size_t i = 0; i < values_.size(); ++i)
    z.add(names_[i], Matrix::Zero(values_[i].rows(), values_[i].cols()));
  return z;
}

bool operator==(const ParamStore& a, const ParamStore& b) {
  if (a.names_ != b.names_) return false;
  for (std::size_t i = 0; i < a.values_.size(); ++i) {
    if (a.values_[i].rows() != b.values_[i].rows() ||
        a.values_[i].cols() != b.values_[i].cols())
      return false;
    if (std::memcmp(a.values_[i].data(), b.values_[i].data(),
                    sizeof(double) * a.values_[i].size()) != 0)
      return false;
  }
  return true;
}

double GradientBundle::norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < grads.size(); ++i)
    s += grads.value(i).squaredNorm();
  return std::sqrt(s);
}

namespace {

constexpr char kMagic[8] = {'M', 'E', 'B', 'N', 'S', 'P', 'K', '1'};

void write_u64(std::ofstream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64(std::ifstream& in, const std::string& path) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw Error::parse("truncated checkpoint: " + path);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void write_f64(std::ofstream& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  write_u64(out, bits);
}

double read_f64(std::ifstream& in, const std::string& path) {
  std::uint64_t bits = read_u64(in, path);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

}  // namespace

void save_checkpoint(const ParamStore& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error::io("cannot open checkpoint for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_u64(out, params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::string& name = params.name(i);
    const Matrix& m = params.value(i);
    write_u64(out, name.size());
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u64(out, static_cast<std::uint64_t>(m.rows()));
    write_u64(out, static_cast<std::uint64_t>(m.cols()));
    for (std::int64_t r = 0; r < m.rows(); ++r)
      for (std::int64_t c = 0; c < m.cols(); ++c) write_f64(out, m(r, c));
  }
  if (!out) throw Error::io("failed writing checkpoint: " + path);
}

ParamStore load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error::io("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw Error::parse("not a parameter checkpoint: " + path);
  ParamStore params;
  const std::uint64_t count = read_u64(in, path);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t name_len = read_u64(in, path);
    std::string name(name_len, '\0');
    in.read(name.data(), static_cast<std::streamsize>(name_len));
    if (!in) throw Error::parse("truncated checkpoint: " + path);
    const auto rows = static_cast<std::int64_t>(read_u64(in, path));
    const auto cols = static_cast<std::int64_t>(read_u64(in, path));
    if (rows < 0 || cols < 0 || rows * cols > (1LL << 32))
      throw Error::parse("implausible matrix shape in checkpoint: " + path);
    Matrix m(rows, cols);
    for (std::int64_t r = 0; r < rows; ++r)
      for (std::int64_t c = 0; c < cols; ++c) m(r, c) = read_f64(in, path);
    params.add(name, std::move(m));
  }
  return params;
}

}  // namespace mebns
