#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <mutex>
#include <queue>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "alexcmp/error.hpp"
#include "alexcmp/metricspace.hpp"

namespace alexcmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kTreeCacheCapacity = 256;

struct Arc {
  std::uint32_t to;
  double w;
};

struct ShortestPathTree {
  std::vector<double> dist;
  std::vector<std::int64_t> pred;
};

class GraphSpace final : public MetricSpace {
 public:
  GraphSpace(SpaceDescriptor desc, std::vector<GraphInput::Point> points,
             std::vector<std::vector<Arc>> adjacency)
      : MetricSpace(std::move(desc)), points_(std::move(points)), adj_(std::move(adjacency)) {
    for (std::size_t i = 0; i < points_.size(); ++i) index_.emplace(points_[i].id, i);
  }

  std::size_t size() const { return points_.size(); }

  bool contains(const PointRef& x) const override {
    return x.discrete() && static_cast<std::size_t>(x.id) < points_.size();
  }

  double distance(const PointRef& x, const PointRef& y) const override {
    require(x);
    require(y);
    if (x.id == y.id) return 0.0;
    // Always search from the smaller id so distance is exactly symmetric.
    const auto [s, t] = std::minmax(x.id, y.id);
    const double d = tree(s)->dist[static_cast<std::size_t>(t)];
    if (d == kInf) throw Error(ErrorKind::Disconnected, "no path between points");
    return d;
  }

  GeodesicPolyline geodesic(const PointRef& x, const PointRef& y) const override {
    require(x);
    require(y);
    if (x.id == y.id) return {{ref(x.id)}, {0.0}, 0.0};
    const bool flipped = y.id < x.id;
    const std::int64_t s = flipped ? y.id : x.id;
    const std::int64_t t = flipped ? x.id : y.id;
    const auto tr = tree(s);
    if (tr->dist[static_cast<std::size_t>(t)] == kInf) {
      throw Error(ErrorKind::Disconnected, "no path between points");
    }
    GeodesicPolyline g;
    for (std::int64_t v = t; v >= 0; v = tr->pred[static_cast<std::size_t>(v)]) {
      g.points.push_back(ref(v));
      g.cum.push_back(tr->dist[static_cast<std::size_t>(v)]);
      if (v == s) break;
    }
    std::reverse(g.points.begin(), g.points.end());
    std::reverse(g.cum.begin(), g.cum.end());
    g.total = g.cum.back();
    return flipped ? reversed(g) : g;
  }

  PointRef sample_point(Rng& rng) const override {
    std::uniform_int_distribution<std::size_t> pick(0, points_.size() - 1);
    return ref(static_cast<std::int64_t>(pick(rng)));
  }

  std::vector<PointRef> sample_ball(const PointRef& center, double radius, std::size_t count,
                                    Rng& rng) const override {
    require(center);
    const auto tr = tree(center.id);
    std::vector<std::int64_t> inside;
    for (std::size_t v = 0; v < points_.size(); ++v) {
      if (tr->dist[v] <= radius) inside.push_back(static_cast<std::int64_t>(v));
    }
    std::uniform_int_distribution<std::size_t> pick(0, inside.size() - 1);
    std::vector<PointRef> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(ref(inside[pick(rng)]));
    return out;
  }

  PointRef parse_point(std::string_view text) const override {
    const auto it = index_.find(std::string(text));
    if (it == index_.end()) {
      throw Error(ErrorKind::UnknownPoint, "no point with id '" + std::string(text) + "'");
    }
    return ref(static_cast<std::int64_t>(it->second));
  }

  std::string format_point(const PointRef& x) const override {
    require(x);
    return points_[static_cast<std::size_t>(x.id)].id;
  }

  PointRef ref(std::int64_t v) const {
    return PointRef{v, points_[static_cast<std::size_t>(v)].coords};
  }

 private:
  std::shared_ptr<const ShortestPathTree> tree(std::int64_t source) const {
    {
      std::lock_guard lock(cache_mutex_);
      const auto it = cache_.find(source);
      if (it != cache_.end()) return it->second;
    }
    auto built = std::make_shared<const ShortestPathTree>(dijkstra(static_cast<std::size_t>(source)));
    std::lock_guard lock(cache_mutex_);
    if (cache_.emplace(source, built).second) {
      order_.push_back(source);
      if (order_.size() > kTreeCacheCapacity) {
        cache_.erase(order_.front());
        order_.pop_front();
      }
    }
    return built;
  }

  // Among equal-length predecessor choices the smallest vertex index wins.
  ShortestPathTree dijkstra(std::size_t source) const {
    ShortestPathTree t{std::vector<double>(points_.size(), kInf),
                       std::vector<std::int64_t>(points_.size(), -1)};
    using Item = std::pair<double, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    t.dist[source] = 0.0;
    heap.emplace(0.0, static_cast<std::uint32_t>(source));
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (d > t.dist[u]) continue;
      for (const Arc& a : adj_[u]) {
        const double nd = d + a.w;
        if (nd < t.dist[a.to]) {
          t.dist[a.to] = nd;
          t.pred[a.to] = u;
          heap.emplace(nd, a.to);
        } else if (nd == t.dist[a.to] && static_cast<std::int64_t>(u) < t.pred[a.to]) {
          t.pred[a.to] = u;
        }
      }
    }
    return t;
  }

  std::vector<GraphInput::Point> points_;
  std::vector<std::vector<Arc>> adj_;
  std::unordered_map<std::string, std::size_t> index_;

  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<std::int64_t, std::shared_ptr<const ShortestPathTree>> cache_;
  mutable std::deque<std::int64_t> order_;
};

void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                         const char* where) {
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw Error(ErrorKind::MalformedInput,
                  std::string("unknown key '") + item.key() + "' in " + where);
    }
  }
}

}  // namespace

GraphInput parse_graph_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::MalformedInput, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::MalformedInput, "top level must be an object");
  reject_unknown_keys(doc, {"points", "edges"}, "graph");
  if (!doc.contains("points") || !doc["points"].is_array() || !doc.contains("edges") ||
      !doc["edges"].is_array()) {
    throw Error(ErrorKind::MalformedInput, "graph needs 'points' and 'edges' arrays");
  }
  GraphInput in;
  for (const auto& p : doc["points"]) {
    if (!p.is_object()) throw Error(ErrorKind::MalformedInput, "point must be an object");
    reject_unknown_keys(p, {"id", "label"}, "point");
    if (!p.contains("id") || !p["id"].is_string()) {
      throw Error(ErrorKind::MalformedInput, "point needs a string 'id'");
    }
    GraphInput::Point pt{p["id"].get<std::string>(), {}, {}};
    if (p.contains("label")) {
      if (!p["label"].is_string()) throw Error(ErrorKind::MalformedInput, "label must be a string");
      pt.label = p["label"].get<std::string>();
    }
    in.points.push_back(std::move(pt));
  }
  for (const auto& e : doc["edges"]) {
    if (!e.is_object()) throw Error(ErrorKind::MalformedInput, "edge must be an object");
    reject_unknown_keys(e, {"u", "v", "w"}, "edge");
    if (!e.contains("u") || !e["u"].is_string() || !e.contains("v") || !e["v"].is_string() ||
        !e.contains("w") || !e["w"].is_number()) {
      throw Error(ErrorKind::MalformedInput, "edge needs string 'u', 'v' and numeric 'w'");
    }
    const double w = e["w"].get<double>();
    if (!(w > 0.0)) throw Error(ErrorKind::NonPositiveWeight, "edge weight must be positive");
    in.edges.push_back({e["u"].get<std::string>(), e["v"].get<std::string>(), w});
  }
  return in;
}

GraphInput load_graph_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::MalformedInput, "cannot open graph file '" + path + "'");
  std::ostringstream buf;
  buf << file.rdbuf();
  return parse_graph_json(buf.str());
}

SpacePtr make_graph_space(const GraphInput& input, BackendKind kind,
                          std::map<std::string, double> parameters) {
  if (input.points.empty()) throw Error(ErrorKind::MalformedInput, "graph has no points");
  std::unordered_map<std::string, std::uint32_t> index;
  for (std::size_t i = 0; i < input.points.size(); ++i) {
    if (!index.emplace(input.points[i].id, static_cast<std::uint32_t>(i)).second) {
      throw Error(ErrorKind::MalformedInput, "duplicate point id '" + input.points[i].id + "'");
    }
  }
  // Keep the minimum weight per unordered pair.
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> weights;
  for (const auto& e : input.edges) {
    const auto u = index.find(e.u);
    const auto v = index.find(e.v);
    if (u == index.end() || v == index.end()) {
      throw Error(ErrorKind::MalformedInput, "edge references unknown point");
    }
    if (!(e.w > 0.0) || !std::isfinite(e.w)) {
      throw Error(ErrorKind::NonPositiveWeight, "edge weight must be positive and finite");
    }
    if (u->second == v->second) throw Error(ErrorKind::MalformedInput, "self-loop edge");
    const auto key = std::minmax(u->second, v->second);
    const auto [it, inserted] = weights.emplace(key, e.w);
    if (!inserted) it->second = std::min(it->second, e.w);
  }
  std::vector<std::vector<Arc>> adj(input.points.size());
  double sum = 0.0;
  for (const auto& [key, w] : weights) {
    adj[key.first].push_back({key.second, w});
    adj[key.second].push_back({key.first, w});
    sum += w;
  }
  for (auto& arcs : adj) {
    std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.to < b.to; });
  }

  std::vector<bool> seen(adj.size(), false);
  std::vector<std::uint32_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (const Arc& a : adj[u]) {
      if (!seen[a.to]) {
        seen[a.to] = true;
        ++reached;
        stack.push_back(a.to);
      }
    }
  }
  if (reached != adj.size()) throw Error(ErrorKind::Disconnected, "graph is not connected");

  SpaceDescriptor desc;
  desc.kind = kind;
  desc.parameters = std::move(parameters);
  desc.resolution = input.resolution > 0.0
                        ? input.resolution
                        : (weights.empty() ? 1.0 : sum / static_cast<double>(weights.size()));
  desc.distance_error = desc.resolution;
  desc.analytic = false;
  auto space = std::make_shared<GraphSpace>(std::move(desc), input.points, std::move(adj));
  return space;
}

}  // namespace alexcmp
