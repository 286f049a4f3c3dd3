#include "spectral_limits/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "spectral_limits/errors.hpp"
#include "spectral_limits/report_io.hpp"

namespace spectral_limits {

namespace {

class Fnv1a {
 public:
  void add(std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h_ ^= (v >> (8 * b)) & 0xffU;
      h_ *= 0x100000001b3ULL;
    }
  }
  void add(double v) { add(std::bit_cast<std::uint64_t>(v)); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

// Sorted cell list: points are bucketed into cubes of side eps and sorted by cell
// key, so each neighbor cell is one binary search away.
class CellList {
 public:
  CellList(const std::vector<std::vector<double>>& coords, double eps)
      : coords_(coords), eps_(eps), dim_(coords.empty() ? 0 : coords.front().size()) {
    const std::size_t n = coords.size();
    cells_.resize(n * dim_);
    for (std::size_t i = 0; i < n; ++i) {
      if (coords[i].size() != dim_) throw DomainError("build_edges: ragged coordinate rows");
      for (std::size_t k = 0; k < dim_; ++k) {
        cells_[i * dim_ + k] = static_cast<std::int64_t>(std::floor(coords[i][k] / eps));
      }
    }
    order_.resize(n);
    for (std::size_t i = 0; i < n; ++i) order_[i] = static_cast<Index>(i);
    std::sort(order_.begin(), order_.end(), [&](Index a, Index b) {
      const auto c = compare(cell(a), cell(b));
      return c != 0 ? c < 0 : a < b;
    });
    offsets_ = 1;
    for (std::size_t k = 0; k < dim_; ++k) offsets_ *= 3;
  }

  // Appends (i, j), i < j, for every j within eps of i.
  template <class Accept>
  void neighbors_above(Index i, std::vector<Edge>& out, const Accept& accept) const {
    std::vector<std::int64_t> target(dim_);
    const auto own = cell(i);
    for (std::size_t code = 0; code < offsets_; ++code) {
      std::size_t c = code;
      for (std::size_t k = 0; k < dim_; ++k) {
        target[k] = own[k] + static_cast<std::int64_t>(c % 3) - 1;
        c /= 3;
      }
      const std::span<const std::int64_t> key(target);
      auto lo = std::lower_bound(order_.begin(), order_.end(), key, [&](Index a, std::span<const std::int64_t> t) {
        return compare(cell(a), t) < 0;
      });
      for (auto it = lo; it != order_.end() && compare(cell(*it), key) == 0; ++it) {
        const Index j = *it;
        if (j <= i) continue;
        double s = 0.0;
        for (std::size_t k = 0; k < dim_; ++k) {
          const double d = coords_[i][k] - coords_[j][k];
          s += d * d;
        }
        if (std::sqrt(s) < eps_ && accept(i, j)) out.emplace_back(i, j);
      }
    }
  }

 private:
  std::span<const std::int64_t> cell(Index i) const {
    return {cells_.data() + static_cast<std::size_t>(i) * dim_, dim_};
  }
  static int compare(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (a[k] != b[k]) return a[k] < b[k] ? -1 : 1;
    }
    return 0;
  }

  const std::vector<std::vector<double>>& coords_;
  double eps_;
  std::size_t dim_;
  std::vector<std::int64_t> cells_;
  std::vector<Index> order_;
  std::size_t offsets_ = 1;
};

template <class Accept>
std::vector<Edge> search(const std::vector<std::vector<double>>& coords, double eps,
                         unsigned threads, const Accept& accept) {
  if (!(eps > 0.0)) throw DomainError("build_edges: eps must be positive");
  const std::size_t n = coords.size();
  if (n < 2) return {};
  const CellList cells(coords, eps);
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  std::vector<std::vector<Edge>> parts(threads);
  auto work = [&](unsigned t) {
    const std::size_t lo = n * t / threads;
    const std::size_t hi = n * (t + 1) / threads;
    for (std::size_t i = lo; i < hi; ++i) cells.neighbors_above(static_cast<Index>(i), parts[t], accept);
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  std::vector<Edge> edges;
  for (auto& p : parts) edges.insert(edges.end(), p.begin(), p.end());
  std::sort(edges.begin(), edges.end());
  return edges;
}

std::vector<std::vector<double>> embedded_coords(const PointCloud& cloud) {
  std::vector<std::vector<double>> coords;
  coords.reserve(cloud.n());
  for (const auto& p : cloud.points) coords.push_back(p.embedded);
  return coords;
}

std::vector<double> degree_weights(std::size_t n, const std::vector<Edge>& edges, double scale) {
  std::vector<double> w(n, 0.0);
  for (const auto& [i, j] : edges) {
    w[i] += scale;
    w[j] += scale;
  }
  return w;
}

}  // namespace

std::string to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::gamma_m: return "gamma_m";
    case GraphKind::gamma_N: return "gamma_N";
    case GraphKind::custom: return "custom";
  }
  return "unknown";
}

GraphKind graph_kind_from_string(const std::string& name) {
  if (name == "gamma_m") return GraphKind::gamma_m;
  if (name == "gamma_N") return GraphKind::gamma_N;
  if (name == "custom") return GraphKind::custom;
  throw ConfigError("unknown graph kind '" + name + "'");
}

WeightedGraph::WeightedGraph(std::size_t n_vertices, double epsilon, std::vector<Edge> edges,
                             std::vector<double> w_V, std::vector<double> w_E, GraphKind kind,
                             int manifold_dim)
    : n_(n_vertices),
      epsilon_(epsilon),
      edges_(std::move(edges)),
      w_V_(std::move(w_V)),
      w_E_(std::move(w_E)),
      kind_(kind),
      manifold_dim_(manifold_dim) {
  if (!(epsilon_ > 0.0)) throw GraphError("graph scale eps must be positive");
  if (w_V_.size() != n_) throw GraphError("w_V must have one entry per vertex");
  if (w_E_.size() != edges_.size()) throw GraphError("w_E must have one entry per edge");
  for (auto& e : edges_) {
    if (e.first == e.second) throw GraphError("self-loop at vertex " + std::to_string(e.first));
    if (e.first > e.second) std::swap(e.first, e.second);
    if (e.second >= n_) throw GraphError("edge endpoint out of range");
  }
  if (!std::is_sorted(edges_.begin(), edges_.end())) {
    std::vector<std::size_t> perm(edges_.size());
    for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return edges_[a] < edges_[b]; });
    std::vector<Edge> e2;
    std::vector<double> w2;
    for (auto k : perm) {
      e2.push_back(edges_[k]);
      w2.push_back(w_E_[k]);
    }
    edges_ = std::move(e2);
    w_E_ = std::move(w2);
  }
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw GraphError("duplicate edge");
  }
  for (double w : w_V_) {
    if (!(w >= 0.0)) throw GraphError("vertex weights must be nonnegative");
  }
  for (double w : w_E_) {
    if (!(w >= 0.0)) throw GraphError("edge weights must be nonnegative");
  }

  offsets_.assign(n_ + 1, 0);
  for (const auto& [i, j] : edges_) {
    ++offsets_[i + 1];
    ++offsets_[j + 1];
  }
  for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] += offsets_[i];
  adjacency_.resize(2 * edges_.size());
  edge_of_slot_.resize(2 * edges_.size());
  std::vector<Index> fill(offsets_.begin(), offsets_.end() - 1);
  // edges are sorted, so each adjacency row comes out ascending after two passes
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const auto [i, j] = edges_[k];
    adjacency_[fill[j]] = i;
    edge_of_slot_[fill[j]++] = static_cast<Index>(k);
  }
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const auto [i, j] = edges_[k];
    adjacency_[fill[i]] = j;
    edge_of_slot_[fill[i]++] = static_cast<Index>(k);
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (offsets_[i + 1] == offsets_[i]) isolated_.push_back(static_cast<Index>(i));
  }
}

std::vector<Index> WeightedGraph::component_labels(std::size_t* n_components) const {
  constexpr Index kUnset = std::numeric_limits<Index>::max();
  std::vector<Index> label(n_, kUnset);
  std::vector<Index> stack;
  Index next = 0;
  for (std::size_t s = 0; s < n_; ++s) {
    if (label[s] != kUnset) continue;
    label[s] = next;
    stack.push_back(static_cast<Index>(s));
    while (!stack.empty()) {
      const Index v = stack.back();
      stack.pop_back();
      for (Index w : neighbors(v)) {
        if (label[w] == kUnset) {
          label[w] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }
  if (n_components != nullptr) *n_components = next;
  return label;
}

bool WeightedGraph::connected() const {
  std::size_t c = 0;
  component_labels(&c);
  return c <= 1;
}

std::uint64_t WeightedGraph::hash() const {
  Fnv1a h;
  h.add(static_cast<std::uint64_t>(n_));
  h.add(epsilon_);
  for (const auto& [i, j] : edges_) h.add((static_cast<std::uint64_t>(i) << 32) | j);
  for (double w : w_V_) h.add(w);
  for (double w : w_E_) h.add(w);
  return h.value();
}

WeightedGraph WeightedGraph::with_scaled_vertex_weights(double scale) const {
  auto w = w_V_;
  for (auto& v : w) v *= scale;
  return WeightedGraph(n_, epsilon_, edges_, std::move(w), w_E_, kind_, manifold_dim_);
}

std::vector<Edge> build_edges(const std::vector<std::vector<double>>& coords, double eps,
                              unsigned threads) {
  return search(coords, eps, threads, [](Index, Index) { return true; });
}

std::vector<Edge> build_edges(const PointCloud& cloud, DistanceMetric metric, double eps,
                              unsigned threads) {
  const auto coords = embedded_coords(cloud);
  if (metric == DistanceMetric::embedded) return build_edges(coords, eps, threads);
  // d_{R^d} <= d_g, so embedded candidates are a superset of geodesic edges
  return search(coords, eps, threads, [&](Index i, Index j) {
    return geodesic_distance(cloud.manifold, cloud.points[i], cloud.points[j]) < eps;
  });
}

double graph_normalizer(std::size_t n, int m, double eps) {
  const double nn = static_cast<double>(n);
  return nn * (nn - 1.0) * unit_ball_volume(m) * std::pow(eps, m);
}

WeightedGraph gamma_m_from_edges(std::size_t n, int m, double eps, double total_volume,
                                 std::vector<Edge> edges) {
  if (!(total_volume > 0.0)) throw DomainError("gamma_m_eps: total volume must be positive");
  if (n < 2) throw DomainError("gamma_m_eps: need at least two vertices");
  const double we = total_volume / graph_normalizer(n, m, eps);
  std::vector<double> w_E(edges.size(), we);
  return WeightedGraph(n, eps, std::move(edges), std::vector<double>(n, 1.0 / static_cast<double>(n)),
                       std::move(w_E), GraphKind::gamma_m, m);
}

WeightedGraph gamma_N_from_edges(std::size_t n, int m, double eps, std::vector<Edge> edges) {
  if (n < 2) throw DomainError("gamma_N_eps: need at least two vertices");
  const double we = 1.0 / graph_normalizer(n, m, eps);
  auto w_V = degree_weights(n, edges, we);
  std::vector<double> w_E(edges.size(), we);
  return WeightedGraph(n, eps, std::move(edges), std::move(w_V), std::move(w_E), GraphKind::gamma_N, m);
}

WeightedGraph gamma_m_eps(const PointCloud& cloud, double eps, double total_volume,
                          DistanceMetric metric, unsigned threads) {
  return gamma_m_from_edges(cloud.n(), cloud.manifold.dim(), eps, total_volume,
                            build_edges(cloud, metric, eps, threads));
}

WeightedGraph gamma_N_eps(const PointCloud& cloud, double eps, DistanceMetric metric,
                          unsigned threads) {
  return gamma_N_from_edges(cloud.n(), cloud.manifold.dim(), eps,
                            build_edges(cloud, metric, eps, threads));
}

GraphFunction laplacian_apply(const WeightedGraph& g, const GraphFunction& phi) {
  const std::size_t n = g.n_vertices();
  if (static_cast<std::size_t>(phi.size()) != n) throw DomainError("laplacian_apply: size mismatch");
  const auto& w_V = g.w_V();
  const auto& w_E = g.w_E();
  const double c = 2.0 / (g.epsilon() * g.epsilon());
  GraphFunction out(static_cast<Eigen::Index>(n));
  for (Index x = 0; x < n; ++x) {
    if (!(w_V[x] > 0.0)) {
      throw GraphError("laplacian_apply: vertex " + std::to_string(x) + " has zero weight w_V");
    }
    double s = 0.0;
    const auto nb = g.neighbors(x);
    const auto ed = g.incident_edges(x);
    for (std::size_t k = 0; k < nb.size(); ++k) s += (phi[x] - phi[nb[k]]) * w_E[ed[k]];
    out[x] = c * s / w_V[x];
  }
  return out;
}

RandomWalkMatrix::RandomWalkMatrix(std::size_t n, double eps, const std::vector<Edge>& edges)
    : eps_(eps), degree_(n, 0), offsets_(n + 1, 0) {
  for (const auto& [i, j] : edges) {
    ++degree_[i];
    ++degree_[j];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (degree_[i] == 0) {
      throw GraphError("random_walk_matrix: row " + std::to_string(i) + " has zero degree");
    }
    offsets_[i + 1] = offsets_[i] + degree_[i];
  }
  adjacency_.resize(offsets_[n]);
  std::vector<Index> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [i, j] : edges) {
    adjacency_[fill[i]++] = j;
    adjacency_[fill[j]++] = i;
  }
}

GraphFunction RandomWalkMatrix::apply(const GraphFunction& phi) const {
  const std::size_t n = size();
  const double c = 2.0 / (eps_ * eps_);
  GraphFunction out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (Index k = offsets_[i]; k < offsets_[i + 1]; ++k) s += phi[adjacency_[k]];
    out[static_cast<Eigen::Index>(i)] = c * (phi[static_cast<Eigen::Index>(i)] - s / degree_[i]);
  }
  return out;
}

Eigen::MatrixXd RandomWalkMatrix::to_dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  const double c = 2.0 / (eps_ * eps_);
  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n, n) * c;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Index k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      L(i, adjacency_[k]) -= c / degree_[i];
    }
  }
  return L;
}

RandomWalkMatrix random_walk_matrix(const PointCloud& cloud, double eps, DistanceMetric metric) {
  return RandomWalkMatrix(cloud.n(), eps, build_edges(cloud, metric, eps));
}

std::vector<int> bfs_hops(const WeightedGraph& g, Index source, int max_hops) {
  std::vector<int> hops(g.n_vertices(), -1);
  if (source >= g.n_vertices()) throw DomainError("bfs_hops: vertex out of range");
  std::vector<Index> frontier{source};
  std::vector<Index> next;
  hops[source] = 0;
  int level = 0;
  while (!frontier.empty() && (max_hops < 0 || level < max_hops)) {
    ++level;
    next.clear();
    for (Index v : frontier) {
      for (Index w : g.neighbors(v)) {
        if (hops[w] < 0) {
          hops[w] = level;
          next.push_back(w);
        }
      }
    }
    frontier.swap(next);
  }
  return hops;
}

double graph_distance(const WeightedGraph& g, Index i, Index j) {
  if (i >= g.n_vertices() || j >= g.n_vertices()) throw DomainError("graph_distance: out of range");
  const auto hops = bfs_hops(g, i);
  return hops[j] < 0 ? kInfiniteDistance : hops[j] * g.epsilon();
}

std::vector<Index> ball(const WeightedGraph& g, Index i, double r) {
  if (!(r > 0.0)) throw DomainError("ball: r must be positive");
  // largest hop count h with h * eps < r
  const double q = r / g.epsilon();
  int max_hops = static_cast<int>(std::ceil(q)) - 1;
  if (max_hops < 0) max_hops = 0;
  const auto hops = bfs_hops(g, i, max_hops);
  std::vector<Index> out;
  for (Index v = 0; v < g.n_vertices(); ++v) {
    if (hops[v] >= 0 && hops[v] * g.epsilon() < r) out.push_back(v);
  }
  return out;
}

double graph_volume(const WeightedGraph& g, std::span<const Index> subset) {
  double s = 0.0;
  for (Index v : subset) s += g.w_V()[v];
  return s;
}

double graph_volume(const WeightedGraph& g) {
  double s = 0.0;
  for (double w : g.w_V()) s += w;
  return s;
}

double dirichlet_energy(const WeightedGraph& g, const GraphFunction& phi) {
  if (static_cast<std::size_t>(phi.size()) != g.n_vertices()) {
    throw DomainError("dirichlet_energy: size mismatch");
  }
  const double inv = 1.0 / g.epsilon();
  double s = 0.0;
  const auto& edges = g.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const double d = (phi[edges[k].first] - phi[edges[k].second]) * inv;
    s += d * d * g.w_E()[k];
  }
  return 2.0 * s;
}

double inner_product(const WeightedGraph& g, const GraphFunction& phi, const GraphFunction& psi) {
  double s = 0.0;
  const auto& w = g.w_V();
  for (std::size_t i = 0; i < w.size(); ++i) {
    s += phi[static_cast<Eigen::Index>(i)] * psi[static_cast<Eigen::Index>(i)] * w[i];
  }
  return s;
}

void write_edges_csv(std::ostream& os, const WeightedGraph& g) {
  std::string line = "# kind=" + to_string(g.kind()) + " n=" + std::to_string(g.n_vertices()) +
                     " epsilon=";
  append_number(line, g.epsilon());
  line += "\ni,j,w_E\n";
  os << line;
  for (std::size_t k = 0; k < g.n_edges(); ++k) {
    line = std::to_string(g.edges()[k].first) + "," + std::to_string(g.edges()[k].second) + ",";
    append_number(line, g.w_E()[k]);
    line += '\n';
    os << line;
  }
}

void write_vertices_csv(std::ostream& os, const WeightedGraph& g) {
  std::string line = "# kind=" + to_string(g.kind()) + " n=" + std::to_string(g.n_vertices()) +
                     " epsilon=";
  append_number(line, g.epsilon());
  line += "\ni,w_V,deg\n";
  os << line;
  for (Index i = 0; i < g.n_vertices(); ++i) {
    line = std::to_string(i) + ",";
    append_number(line, g.w_V()[i]);
    line += "," + std::to_string(g.degree(i)) + "\n";
    os << line;
  }
}

}  // namespace spectral_limits
