#pragma once

// Geodesic metric spaces: a common interface over graph backends (shortest
// paths on weighted graphs) and analytic backends (plane, round sphere,
// hyperbolic plane, flat cone) that evaluate distances and geodesics in
// closed form.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "alexcmp/vec3.hpp"

namespace alexcmp {

using Rng = std::mt19937_64;

/// A point of one particular space. Discrete backends identify points by a
/// vertex index (coords are report-only); analytic backends leave id = -1 and
/// carry the point in chart coordinates.
struct PointRef {
  std::int64_t id = -1;
  Vec3 coords{};

  bool discrete() const noexcept { return id >= 0; }
  friend bool operator==(const PointRef&, const PointRef&) = default;
};

enum class BackendKind : std::uint8_t { Graph, Plane, Sphere, SphereMesh, Hyperbolic, Cone };

std::string_view to_string(BackendKind kind);

struct SpaceDescriptor {
  BackendKind kind = BackendKind::Graph;
  std::map<std::string, double> parameters;
  /// Typical point spacing h. Analytic backends declare a nominal value used
  /// for sampling and probe floors.
  double resolution = 0.0;
  /// Distance error bound eta; zero for analytic backends.
  double distance_error = 0.0;
  bool analytic = false;
};

/// Arclength-parameterized shortest path. For analytic backends consecutive
/// points are joined by the unique model geodesic; for discrete backends the
/// points are the path vertices.
struct GeodesicPolyline {
  std::vector<PointRef> points;
  std::vector<double> cum;
  double total = 0.0;

  const PointRef& front() const { return points.front(); }
  const PointRef& back() const { return points.back(); }
};

GeodesicPolyline reversed(const GeodesicPolyline& g);

struct Located {
  PointRef point;
  double arclength = 0.0;  // actual arclength of `point` along the polyline
};

class MetricSpace {
 public:
  virtual ~MetricSpace() = default;
  MetricSpace(const MetricSpace&) = delete;
  MetricSpace& operator=(const MetricSpace&) = delete;

  const SpaceDescriptor& descriptor() const noexcept { return desc_; }
  double resolution() const noexcept { return desc_.resolution; }
  double distance_error() const noexcept { return desc_.distance_error; }
  bool analytic() const noexcept { return desc_.analytic; }

  virtual bool contains(const PointRef& x) const = 0;
  /// Throws Error(UnknownPoint).
  virtual double distance(const PointRef& x, const PointRef& y) const = 0;
  /// Throws Error(UnknownPoint) or Error(Disconnected).
  virtual GeodesicPolyline geodesic(const PointRef& x, const PointRef& y) const = 0;

  /// A point drawn from the backend's sampling domain.
  virtual PointRef sample_point(Rng& rng) const = 0;
  /// `count` points drawn uniformly from the closed ball B(center, radius).
  /// The first n draws do not depend on `count`.
  virtual std::vector<PointRef> sample_ball(const PointRef& center, double radius,
                                            std::size_t count, Rng& rng) const = 0;

  /// Textual point identifiers used by the CLI.
  virtual PointRef parse_point(std::string_view text) const = 0;
  virtual std::string format_point(const PointRef& x) const = 0;

  bool same_point(const PointRef& a, const PointRef& b) const;

  /// Point at arclength t. Discrete backends return the polyline vertex
  /// nearest to t (ties to the smaller index). Throws Error(RangeError).
  Located locate(const GeodesicPolyline& g, double t) const;
  PointRef point_at(const GeodesicPolyline& g, double t) const { return locate(g, t).point; }

  /// Piece of g between arclengths s0 and s1, oriented from s0 to s1.
  GeodesicPolyline subpath(const GeodesicPolyline& g, double s0, double s1) const;

 protected:
  explicit MetricSpace(SpaceDescriptor desc) : desc_(std::move(desc)) {}

  void require(const PointRef& x) const;

  /// Point at arclength t on the model geodesic from a to b (analytic only).
  virtual PointRef interpolate(const PointRef& a, const PointRef& b, double length,
                               double t) const;

 private:
  SpaceDescriptor desc_;
};

using SpacePtr = std::shared_ptr<const MetricSpace>;

// Analytic backends.

/// Euclidean plane; samples from the disk of radius `extent`.
SpacePtr make_plane(double extent = 1.0, double resolution = 1e-3);
/// Round sphere of radius R with exact great-circle distances.
SpacePtr make_sphere(double radius = 1.0, double resolution = 1e-3);
/// Hyperbolic plane of curvature -1; samples from the ball of radius `extent`
/// around the chart origin.
SpacePtr make_hyperbolic(double extent = 1.0, double resolution = 1e-3);
/// Flat cone of total angle `angle` (a planar sector with its boundary rays
/// glued), evaluated by unrolling; samples from radius <= `extent`.
SpacePtr make_cone(double angle, double resolution = 1e-2, double extent = 1.0);

// Graph backends.

struct GraphInput {
  struct Point {
    std::string id;
    std::string label;
    Vec3 coords{};
  };
  struct Edge {
    std::string u;
    std::string v;
    double w = 0.0;
  };
  std::vector<Point> points;
  std::vector<Edge> edges;
  /// Edge length scale; 0 means "mean edge weight".
  double resolution = 0.0;
};

/// Parses the graph JSON schema. Throws Error(MalformedInput) on schema
/// violations (including unknown keys) and Error(NonPositiveWeight).
GraphInput parse_graph_json(std::string_view text);
GraphInput load_graph_file(const std::string& path);

/// Undirected weighted graph metric. Duplicate edges keep the minimum weight.
/// Throws Error(MalformedInput), Error(NonPositiveWeight), Error(Disconnected).
SpacePtr make_graph_space(const GraphInput& input, BackendKind kind = BackendKind::Graph,
                          std::map<std::string, double> parameters = {});

/// Icosphere of radius R at the given subdivision level as a graph space whose
/// edges join vertices up to `ring` mesh edges apart, weighted by exact
/// great-circle distance. Resolution is the mean mesh edge length.
SpacePtr make_sphere_mesh(double radius, int level, int ring = 4);

/// Space from a one-line spec:
///   graph:<path> | plane | sphere:R=<num>[,mesh=<level>] | hyperbolic |
///   cone:angle=<num>[,res=<num>]
/// Throws Error(MalformedInput).
SpacePtr make_space(std::string_view spec);

}  // namespace alexcmp
