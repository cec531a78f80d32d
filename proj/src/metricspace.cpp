#include "alexcmp/metricspace.hpp"

#include <algorithm>
#include <cmath>

#include "alexcmp/error.hpp"

namespace alexcmp {

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::Graph: return "graph";
    case BackendKind::Plane: return "plane";
    case BackendKind::Sphere: return "sphere";
    case BackendKind::SphereMesh: return "sphere-mesh";
    case BackendKind::Hyperbolic: return "hyperbolic";
    case BackendKind::Cone: return "cone";
  }
  return "?";
}

GeodesicPolyline reversed(const GeodesicPolyline& g) {
  GeodesicPolyline out;
  out.total = g.total;
  out.points.assign(g.points.rbegin(), g.points.rend());
  out.cum.reserve(g.cum.size());
  for (auto it = g.cum.rbegin(); it != g.cum.rend(); ++it) out.cum.push_back(g.total - *it);
  if (!out.cum.empty()) {
    out.cum.front() = 0.0;
    out.cum.back() = g.total;
  }
  return out;
}

bool MetricSpace::same_point(const PointRef& a, const PointRef& b) const {
  if (a.discrete() || b.discrete()) return a.id == b.id;
  return a.coords == b.coords;
}

void MetricSpace::require(const PointRef& x) const {
  if (!contains(x)) throw Error(ErrorKind::UnknownPoint, "point does not belong to this space");
}

PointRef MetricSpace::interpolate(const PointRef&, const PointRef&, double, double) const {
  throw Error(ErrorKind::InvalidArgument, "interpolation requires an analytic backend");
}

Located MetricSpace::locate(const GeodesicPolyline& g, double t) const {
  if (g.points.empty()) throw Error(ErrorKind::InvalidArgument, "empty polyline");
  const double eps = 1e-12 * std::max(1.0, g.total);
  if (!(t >= -eps) || !(t <= g.total + eps)) {
    throw Error(ErrorKind::RangeError, "arclength outside [0, total]");
  }
  t = std::clamp(t, 0.0, g.total);
  if (t <= 0.0 || g.points.size() == 1) return {g.front(), 0.0};
  if (t >= g.total) return {g.back(), g.total};

  // First breakpoint with cum > t; the segment is [i-1, i].
  const auto it = std::upper_bound(g.cum.begin(), g.cum.end(), t);
  const auto i = static_cast<std::size_t>(it - g.cum.begin());
  const std::size_t lo = i - 1;
  if (!analytic()) {
    const double before = t - g.cum[lo];
    const double after = g.cum[i] - t;
    return after < before ? Located{g.points[i], g.cum[i]} : Located{g.points[lo], g.cum[lo]};
  }
  const double local = t - g.cum[lo];
  if (local <= 0.0) return {g.points[lo], g.cum[lo]};
  return {interpolate(g.points[lo], g.points[i], g.cum[i] - g.cum[lo], local), t};
}

GeodesicPolyline MetricSpace::subpath(const GeodesicPolyline& g, double s0, double s1) const {
  if (s0 > s1) return reversed(subpath(g, s1, s0));
  const Located start = locate(g, s0);
  const Located end = locate(g, s1);

  GeodesicPolyline out;
  out.points.push_back(start.point);
  out.cum.push_back(0.0);
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    if (g.cum[i] > start.arclength && g.cum[i] < end.arclength) {
      out.points.push_back(g.points[i]);
      out.cum.push_back(g.cum[i] - start.arclength);
    }
  }
  if (end.arclength > start.arclength) {
    out.points.push_back(end.point);
    out.cum.push_back(end.arclength - start.arclength);
  }
  out.total = out.cum.back();
  return out;
}

}  // namespace alexcmp
