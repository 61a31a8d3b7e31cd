#include "mebns/graph.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <utility>

#include "mebns/error.hpp"
#include "mebns/rng.hpp"

namespace mebns {

namespace {

Matrix one_hot_features(std::int64_t n, std::int64_t dim) {
  if (dim <= 0) dim = n;
  Matrix f = Matrix::Zero(n, dim);
  for (std::int64_t i = 0; i < n && i < dim; ++i) f(i, i) = 1.0;
  return f;
}

}  // namespace

Graph Graph::from_edges(std::int64_t num_nodes, std::vector<Edge> edges,
                        Matrix features, std::int64_t onehot_dim) {
  if (num_nodes < 0) throw Error::config("graph node count must be >= 0");
  Graph g;
  g.num_nodes_ = num_nodes;

  // Canonicalize, drop self-loops, dedup.
  std::vector<Edge> cleaned;
  cleaned.reserve(edges.size());
  for (Edge e : edges) {
    if (e.u == e.v) {
      ++g.dropped_self_loops_;
      continue;
    }
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.u < 0 || e.v >= num_nodes)
      throw Error::parse("edge endpoint out of range: (" +
                         std::to_string(e.u) + ", " + std::to_string(e.v) +
                         ") with " + std::to_string(num_nodes) + " nodes");
    cleaned.push_back(e);
  }
  std::sort(cleaned.begin(), cleaned.end());
  auto last = std::unique(cleaned.begin(), cleaned.end());
  g.dropped_duplicates_ =
      static_cast<std::int64_t>(cleaned.end() - last);
  cleaned.erase(last, cleaned.end());
  g.edges_ = std::move(cleaned);

  // CSR with sorted rows.
  g.offsets_.assign(num_nodes + 1, 0);
  for (const Edge& e : g.edges_) {
    ++g.offsets_[e.u + 1];
    ++g.offsets_[e.v + 1];
  }
  for (std::int64_t i = 0; i < num_nodes; ++i)
    g.offsets_[i + 1] += g.offsets_[i];
  g.targets_.resize(g.offsets_[num_nodes]);
  std::vector<std::int64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const Edge& e : g.edges_) {
    g.targets_[cursor[e.u]++] = e.v;
    g.targets_[cursor[e.v]++] = e.u;
  }
  for (std::int64_t i = 0; i < num_nodes; ++i)
    std::sort(g.targets_.begin() + g.offsets_[i],
              g.targets_.begin() + g.offsets_[i + 1]);

  if (features.cols() == 0) {
    features = one_hot_features(num_nodes, onehot_dim);
  } else if (features.rows() != num_nodes) {
    throw Error::parse("feature matrix has " +
                       std::to_string(features.rows()) + " rows but graph has " +
                       std::to_string(num_nodes) + " nodes");
  }
  g.features_ = std::make_shared<Matrix>(std::move(features));
  return g;
}

bool Graph::has_edge(std::int64_t u, std::int64_t v) const {
  if (u == v) return false;
  if (u < 0 || v < 0 || u >= num_nodes_ || v >= num_nodes_) return false;
  // Search from the lower-degree endpoint.
  if (degree(u) > degree(v)) std::swap(u, v);
  auto begin = targets_.begin() + offsets_[u];
  auto end = targets_.begin() + offsets_[u + 1];
  return std::binary_search(begin, end, v);
}

namespace {

// Splits a line into whitespace-delimited fields (tabs or spaces).
std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::int64_t parse_int(std::string_view s, const std::string& where) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error::parse(where + ": expected integer, got '" + std::string(s) +
                       "'");
  return v;
}

double parse_double(std::string_view s, const std::string& where) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error::parse(where + ": expected number, got '" + std::string(s) +
                       "'");
  return v;
}

bool is_comment_or_blank(std::string_view line) {
  for (char c : line) {
    if (c == ' ' || c == '\t' || c == '\r') continue;
    return c == '#';
  }
  return true;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

Graph load_graph(const std::string& edge_path, const std::string& feature_path,
                 std::int64_t declared_nodes, std::int64_t onehot_dim) {
  std::ifstream in(edge_path);
  if (!in) throw Error::io("cannot open edge file: " + edge_path);

  std::vector<Edge> edges;
  std::int64_t max_id = -1;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (is_comment_or_blank(line)) continue;
    auto fields = split_fields(line);
    const std::string where = edge_path + ":" + std::to_string(lineno);
    if (fields.size() != 2)
      throw Error::parse(where + ": expected 'u<TAB>v', got " +
                         std::to_string(fields.size()) + " fields");
    Edge e{parse_int(fields[0], where), parse_int(fields[1], where)};
    if (e.u < 0 || e.v < 0)
      throw Error::parse(where + ": negative node id");
    if (declared_nodes >= 0 && (e.u >= declared_nodes || e.v >= declared_nodes))
      throw Error::parse(where + ": node id " +
                         std::to_string(std::max(e.u, e.v)) +
                         " out of range (num_nodes = " +
                         std::to_string(declared_nodes) + ")");
    max_id = std::max({max_id, e.u, e.v});
    edges.push_back(e);
  }

  Matrix features(0, 0);
  std::int64_t feature_max_id = -1;
  std::vector<std::pair<std::int64_t, std::vector<double>>> rows;
  if (!feature_path.empty()) {
    std::ifstream fin(feature_path);
    if (!fin) throw Error::io("cannot open feature file: " + feature_path);
    std::int64_t flineno = 0;
    std::size_t dim = 0;
    while (std::getline(fin, line)) {
      ++flineno;
      strip_cr(line);
      if (is_comment_or_blank(line)) continue;
      const std::string where = feature_path + ":" + std::to_string(flineno);
      std::vector<double> vals;
      std::int64_t id = -1;
      std::size_t start = 0, field = 0;
      for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
          std::string_view f(line.data() + start, i - start);
          if (field == 0)
            id = parse_int(f, where);
          else
            vals.push_back(parse_double(f, where));
          start = i + 1;
          ++field;
        }
      }
      if (id < 0) throw Error::parse(where + ": negative node id");
      if (declared_nodes >= 0 && id >= declared_nodes)
        throw Error::parse(where + ": node id " + std::to_string(id) +
                           " out of range (num_nodes = " +
                           std::to_string(declared_nodes) + ")");
      if (dim == 0) dim = vals.size();
      if (vals.size() != dim)
        throw Error::parse(where + ": inconsistent feature width (" +
                           std::to_string(vals.size()) + " vs " +
                           std::to_string(dim) + ")");
      feature_max_id = std::max(feature_max_id, id);
      rows.emplace_back(id, std::move(vals));
    }
    if (rows.empty())
      throw Error::parse(feature_path + ": no feature rows");
  }

  std::int64_t n = declared_nodes >= 0
                       ? declared_nodes
                       : std::max(max_id, feature_max_id) + 1;
  if (n <= 0) throw Error::parse(edge_path + ": no nodes found");

  if (!rows.empty()) {
    features = Matrix::Zero(n, static_cast<std::int64_t>(rows[0].second.size()));
    for (auto& [id, vals] : rows)
      for (std::size_t j = 0; j < vals.size(); ++j)
        features(id, static_cast<std::int64_t>(j)) = vals[j];
  }

  return Graph::from_edges(n, std::move(edges), std::move(features),
                           onehot_dim);
}

EdgeSplit split_edges(const Graph& g, std::uint64_t seed) {
  const std::int64_t m = g.num_edges();
  if (m < 10)
    throw Error::config("edge split needs at least 10 edges, graph has " +
                        std::to_string(m));

  std::vector<Edge> shuffled = g.edge_list();
  Rng rng(mix_seed(seed, stream::split));
  // Fisher-Yates.
  for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
    std::size_t j = rng.index(i + 1);
    std::swap(shuffled[i], shuffled[j]);
  }

  // floor(0.7m) / floor(0.1m) in exact integer arithmetic; remainder to test.
  const auto n_train = static_cast<std::size_t>((7 * m) / 10);
  const auto n_valid = static_cast<std::size_t>(m / 10);

  EdgeSplit s;
  s.train.assign(shuffled.begin(), shuffled.begin() + n_train);
  s.valid.assign(shuffled.begin() + n_train,
                 shuffled.begin() + n_train + n_valid);
  s.test.assign(shuffled.begin() + n_train + n_valid, shuffled.end());
  s.message_graph = Graph::from_edges(g.num_nodes(), s.train,
                                      Matrix(g.features()));
  return s;
}

std::vector<std::int64_t> k_hop_candidates(const Graph& g, std::int64_t u,
                                           int k) {
  if (k < 2) throw Error::config("k-hop candidates require k >= 2");
  if (u < 0 || u >= g.num_nodes())
    throw Error::config("k-hop start node out of range");

  std::vector<int> dist(g.num_nodes(), -1);
  std::deque<std::int64_t> queue{u};
  dist[u] = 0;
  std::vector<std::int64_t> out;
  const auto& off = g.csr_offsets();
  const auto& tgt = g.csr_targets();
  while (!queue.empty()) {
    std::int64_t x = queue.front();
    queue.pop_front();
    if (dist[x] >= k) continue;
    for (std::int64_t i = off[x]; i < off[x + 1]; ++i) {
      std::int64_t y = tgt[i];
      if (dist[y] >= 0) continue;
      dist[y] = dist[x] + 1;
      if (dist[y] >= 2) out.push_back(y);
      queue.push_back(y);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::int64_t AugmentedView::kept_edges() const {
  std::int64_t n = 0;
  for (auto b : keep) n += b;
  return n;
}

AugmentedView drop_edge(const Graph& g, double rho, std::uint64_t seed) {
  if (!(rho >= 0.0 && rho <= 1.0))
    throw Error::config("drop_edge rate must be in [0, 1]");
  AugmentedView view;
  view.base = &g;
  view.rho = rho;
  view.keep.resize(g.edge_list().size());
  Rng rng(seed);
  for (std::size_t i = 0; i < view.keep.size(); ++i)
    view.keep[i] = rng.uniform() >= rho ? 1 : 0;
  return view;
}

namespace {

struct AdjEntry {
  std::int64_t target;
  double value;
};

}  // namespace

NormAdjacency NormAdjacency::build(const Graph& g) {
  AugmentedView all;
  all.base = &g;
  all.rho = 0.0;
  all.keep.assign(g.edge_list().size(), 1);
  return build(all);
}

NormAdjacency NormAdjacency::build(const AugmentedView& view) {
  const Graph& g = *view.base;
  const std::int64_t n = g.num_nodes();

  std::vector<double> deg(n, 1.0);  // self-loop contributes 1
  const auto& edges = g.edge_list();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!view.keep[i]) continue;
    deg[edges[i].u] += 1.0;
    deg[edges[i].v] += 1.0;
  }

  std::vector<std::vector<AdjEntry>> rows(n);
  for (std::int64_t u = 0; u < n; ++u)
    rows[u].push_back({u, 1.0 / deg[u]});
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!view.keep[i]) continue;
    const auto [u, v] = edges[i];
    const double w = 1.0 / std::sqrt(deg[u] * deg[v]);
    rows[u].push_back({v, w});
    rows[v].push_back({u, w});
  }

  NormAdjacency a;
  a.n_ = n;
  a.offsets_.assign(1, 0);
  a.offsets_.reserve(n + 1);
  for (std::int64_t u = 0; u < n; ++u) {
    std::sort(rows[u].begin(), rows[u].end(),
              [](const AdjEntry& x, const AdjEntry& y) {
                return x.target < y.target;
              });
    for (const AdjEntry& e : rows[u]) {
      a.targets_.push_back(e.target);
      a.values_.push_back(e.value);
    }
    a.offsets_.push_back(static_cast<std::int64_t>(a.targets_.size()));
  }
  return a;
}

Matrix NormAdjacency::multiply(const Matrix& x) const {
  Matrix out(n_, x.cols());
  for (std::int64_t j = 0; j < x.cols(); ++j) {
    for (std::int64_t u = 0; u < n_; ++u) {
      double s = 0.0;
      for (std::int64_t k = offsets_[u]; k < offsets_[u + 1]; ++k)
        s += values_[k] * x(targets_[k], j);
      out(u, j) = s;
    }
  }
  return out;
}

double NormAdjacency::entry(std::int64_t u, std::int64_t v) const {
  for (std::int64_t k = offsets_[u]; k < offsets_[u + 1]; ++k)
    if (targets_[k] == v) return values_[k];
  return 0.0;
}

}  // namespace mebns
