#include <algorithm>
#include <cmath>
#include <numbers>

#include "alexcmp/error.hpp"
#include "alexcmp/metricspace.hpp"
#include "text_util.hpp"

namespace alexcmp {

namespace {

constexpr double kPi = std::numbers::pi;

double uniform(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be positive");
  }
}

SpaceDescriptor analytic_descriptor(BackendKind kind, double resolution,
                                    std::map<std::string, double> params) {
  require_positive(resolution, "resolution");
  SpaceDescriptor d;
  d.kind = kind;
  d.parameters = std::move(params);
  d.resolution = resolution;
  d.distance_error = 0.0;
  d.analytic = true;
  return d;
}

GeodesicPolyline segment(const PointRef& x, const PointRef& y, double length) {
  if (length <= 0.0) return {{x}, {0.0}, 0.0};
  return {{x, y}, {0.0, length}, length};
}

// ---------------------------------------------------------------------------

class PlaneSpace final : public MetricSpace {
 public:
  PlaneSpace(double extent, double resolution)
      : MetricSpace(analytic_descriptor(BackendKind::Plane, resolution, {{"extent", extent}})),
        extent_(extent) {
    require_positive(extent, "extent");
  }

  bool contains(const PointRef& x) const override {
    return !x.discrete() && x.coords.z == 0.0 && std::isfinite(x.coords.x) &&
           std::isfinite(x.coords.y);
  }

  double distance(const PointRef& x, const PointRef& y) const override {
    require(x);
    require(y);
    return norm(x.coords - y.coords);
  }

  GeodesicPolyline geodesic(const PointRef& x, const PointRef& y) const override {
    return segment(x, y, distance(x, y));
  }

  PointRef sample_point(Rng& rng) const override { return disk(PointRef{}, extent_, rng); }

  std::vector<PointRef> sample_ball(const PointRef& center, double radius, std::size_t count,
                                    Rng& rng) const override {
    require(center);
    std::vector<PointRef> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(disk(center, radius, rng));
    return out;
  }

  PointRef parse_point(std::string_view text) const override {
    const auto [x, y] = detail::parse_pair(text);
    return at(x, y);
  }

  std::string format_point(const PointRef& x) const override {
    return detail::format_double(x.coords.x) + "," + detail::format_double(x.coords.y);
  }

  static PointRef at(double x, double y) { return PointRef{-1, {x, y, 0.0}}; }

 protected:
  PointRef interpolate(const PointRef& a, const PointRef& b, double length,
                       double t) const override {
    const double s = t / length;
    return at(a.coords.x + s * (b.coords.x - a.coords.x), a.coords.y + s * (b.coords.y - a.coords.y));
  }

 private:
  static PointRef disk(const PointRef& c, double radius, Rng& rng) {
    const double rho = radius * std::sqrt(uniform(rng));
    const double phi = 2.0 * kPi * uniform(rng);
    return at(c.coords.x + rho * std::cos(phi), c.coords.y + rho * std::sin(phi));
  }

  double extent_;
};

// ---------------------------------------------------------------------------

class SphereSpace final : public MetricSpace {
 public:
  SphereSpace(double radius, double resolution)
      : MetricSpace(analytic_descriptor(BackendKind::Sphere, resolution, {{"R", radius}})),
        R_(radius) {
    require_positive(radius, "sphere radius");
  }

  bool contains(const PointRef& x) const override {
    return !x.discrete() && std::abs(norm(x.coords) - R_) <= 1e-9 * R_;
  }

  double distance(const PointRef& x, const PointRef& y) const override {
    require(x);
    require(y);
    return R_ * std::atan2(norm(cross(x.coords, y.coords)), dot(x.coords, y.coords));
  }

  GeodesicPolyline geodesic(const PointRef& x, const PointRef& y) const override {
    return segment(x, y, distance(x, y));
  }

  PointRef sample_point(Rng& rng) const override {
    const double z = 2.0 * uniform(rng) - 1.0;
    const double phi = 2.0 * kPi * uniform(rng);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return on_sphere({s * std::cos(phi), s * std::sin(phi), z});
  }

  std::vector<PointRef> sample_ball(const PointRef& center, double radius, std::size_t count,
                                    Rng& rng) const override {
    require(center);
    const double cap = std::min(radius / R_, kPi);
    const double zmin = std::cos(cap);
    const Vec3 c = (1.0 / R_) * center.coords;
    const double polar = std::atan2(std::hypot(c.x, c.y), c.z);
    const double azimuth = std::atan2(c.y, c.x);
    std::vector<PointRef> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double z = zmin + (1.0 - zmin) * uniform(rng);
      const double phi = 2.0 * kPi * uniform(rng);
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      out.push_back(on_sphere(rotate({s * std::cos(phi), s * std::sin(phi), z}, polar, azimuth)));
    }
    return out;
  }

  /// "lat,lon" in degrees.
  PointRef parse_point(std::string_view text) const override {
    const auto [lat, lon] = detail::parse_pair(text);
    if (std::abs(lat) > 90.0) throw Error(ErrorKind::MalformedInput, "latitude outside [-90, 90]");
    return latlon(lat * kPi / 180.0, lon * kPi / 180.0);
  }

  std::string format_point(const PointRef& x) const override {
    const Vec3 u = (1.0 / R_) * x.coords;
    const double lat = std::atan2(u.z, std::hypot(u.x, u.y)) * 180.0 / kPi;
    const double lon = std::atan2(u.y, u.x) * 180.0 / kPi;
    return detail::format_double(lat) + "," + detail::format_double(lon);
  }

  PointRef latlon(double lat, double lon) const {
    return on_sphere({std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)});
  }

 protected:
  PointRef interpolate(const PointRef& a, const PointRef& b, double length,
                       double t) const override {
    const double L = length / R_;
    const double s = std::sin(L);
    const Vec3 v = (std::sin(L - t / R_) / s) * a.coords + (std::sin(t / R_) / s) * b.coords;
    return on_sphere((1.0 / R_) * v);
  }

 private:
  PointRef on_sphere(const Vec3& unit) const { return PointRef{-1, R_ * normalized(unit)}; }

  // Rotation taking the north pole to the direction (polar, azimuth).
  static Vec3 rotate(const Vec3& p, double polar, double azimuth) {
    const double cp = std::cos(polar), sp = std::sin(polar);
    const Vec3 q{p.x * cp + p.z * sp, p.y, -p.x * sp + p.z * cp};
    const double ca = std::cos(azimuth), sa = std::sin(azimuth);
    return {q.x * ca - q.y * sa, q.x * sa + q.y * ca, q.z};
  }

  double R_;
};

// ---------------------------------------------------------------------------

// Hyperboloid model: x^2 + y^2 - z^2 = -1, z > 0.
class HyperbolicSpace final : public MetricSpace {
 public:
  HyperbolicSpace(double extent, double resolution)
      : MetricSpace(analytic_descriptor(BackendKind::Hyperbolic, resolution, {{"extent", extent}})),
        extent_(extent) {
    require_positive(extent, "extent");
  }

  bool contains(const PointRef& x) const override {
    const Vec3& p = x.coords;
    return !x.discrete() && p.z > 0.0 && std::isfinite(p.z) &&
           std::abs(minkowski(p, p) + 1.0) <= 1e-9 * p.z * p.z;
  }

  double distance(const PointRef& x, const PointRef& y) const override {
    require(x);
    require(y);
    const Vec3 w = x.coords - y.coords;
    return 2.0 * std::asinh(0.5 * std::sqrt(std::max(0.0, minkowski(w, w))));
  }

  GeodesicPolyline geodesic(const PointRef& x, const PointRef& y) const override {
    return segment(x, y, distance(x, y));
  }

  PointRef sample_point(Rng& rng) const override { return ball(origin(), extent_, rng); }

  std::vector<PointRef> sample_ball(const PointRef& center, double radius, std::size_t count,
                                    Rng& rng) const override {
    require(center);
    std::vector<PointRef> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(ball(center, radius, rng));
    return out;
  }

  /// "rho,phi": geodesic polar coordinates about the chart origin.
  PointRef parse_point(std::string_view text) const override {
    const auto [rho, phi] = detail::parse_pair(text);
    if (rho < 0.0) throw Error(ErrorKind::MalformedInput, "rho must be >= 0");
    return polar(rho, phi);
  }

  std::string format_point(const PointRef& x) const override {
    const Vec3& p = x.coords;
    const double rho = std::asinh(std::hypot(p.x, p.y));
    const double phi = rho > 0.0 ? std::atan2(p.y, p.x) : 0.0;
    return detail::format_double(rho) + "," + detail::format_double(phi);
  }

  static PointRef polar(double rho, double phi) {
    return PointRef{-1, {std::sinh(rho) * std::cos(phi), std::sinh(rho) * std::sin(phi), std::cosh(rho)}};
  }
  static PointRef origin() { return polar(0.0, 0.0); }

 protected:
  PointRef interpolate(const PointRef& a, const PointRef& b, double length,
                       double t) const override {
    const double s = std::sinh(length);
    Vec3 v = (std::sinh(length - t) / s) * a.coords + (std::sinh(t) / s) * b.coords;
    return PointRef{-1, (1.0 / std::sqrt(-minkowski(v, v))) * v};
  }

 private:
  // Area-uniform draw in B(center, radius): sample about the origin and move
  // it by the isometry taking the origin to the center (boost, then rotation).
  static PointRef ball(const PointRef& center, double radius, Rng& rng) {
    const double rho = std::acosh(1.0 + uniform(rng) * (std::cosh(radius) - 1.0));
    const double phi = 2.0 * kPi * uniform(rng);
    const Vec3 p = polar(rho, phi).coords;
    const Vec3& c = center.coords;
    const double b = std::asinh(std::hypot(c.x, c.y));
    const double az = std::atan2(c.y, c.x);
    const double cb = std::cosh(b), sb = std::sinh(b);
    const Vec3 q{p.x * cb + p.z * sb, p.y, p.x * sb + p.z * cb};
    const double ca = std::cos(az), sa = std::sin(az);
    Vec3 out{q.x * ca - q.y * sa, q.x * sa + q.y * ca, q.z};
    out.z = std::sqrt(1.0 + out.x * out.x + out.y * out.y);
    return PointRef{-1, out};
  }

  double extent_;
};

// ---------------------------------------------------------------------------

// Points are stored as (rho, phi, 0) with phi in [0, angle); the apex is the
// zero vector.
class ConeSpace final : public MetricSpace {
 public:
  ConeSpace(double angle, double resolution, double extent)
      : MetricSpace(analytic_descriptor(BackendKind::Cone, resolution,
                                        {{"angle", angle}, {"extent", extent}})),
        angle_(angle),
        extent_(extent) {
    require_positive(angle, "cone angle");
    require_positive(extent, "extent");
  }

  bool contains(const PointRef& x) const override {
    const Vec3& p = x.coords;
    if (x.discrete() || p.z != 0.0 || !std::isfinite(p.x)) return false;
    if (p.x == 0.0) return p.y == 0.0;
    return p.x > 0.0 && p.y >= 0.0 && p.y < angle_;
  }

  double distance(const PointRef& x, const PointRef& y) const override {
    require(x);
    require(y);
    const double r1 = x.coords.x, r2 = y.coords.x;
    const double delta = std::abs(signed_gap(x, y));
    if (delta >= kPi) return r1 + r2;
    const double s = std::sin(0.5 * delta);
    const double d = r1 - r2;
    return std::sqrt(d * d + 4.0 * r1 * r2 * s * s);
  }

  GeodesicPolyline geodesic(const PointRef& x, const PointRef& y) const override {
    const double d = distance(x, y);
    const double r1 = x.coords.x, r2 = y.coords.x;
    if (r1 > 0.0 && r2 > 0.0 && std::abs(signed_gap(x, y)) >= kPi) {
      return {{x, apex(), y}, {0.0, r1, d}, d};
    }
    return segment(x, y, d);
  }

  PointRef sample_point(Rng& rng) const override {
    const double rho = extent_ * std::sqrt(uniform(rng));
    return polar(rho, angle_ * uniform(rng));
  }

  std::vector<PointRef> sample_ball(const PointRef& center, double radius, std::size_t count,
                                    Rng& rng) const override {
    require(center);
    const double rc = center.coords.x;
    double lo = 0.0, hi = rc + radius, phi0 = 0.0, width = angle_;
    if (rc > radius) {
      const double w = std::asin(radius / rc);
      if (2.0 * w < angle_) {
        lo = rc - radius;
        phi0 = center.coords.y - w;
        width = 2.0 * w;
      }
    }
    std::vector<PointRef> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      for (int attempt = 0;; ++attempt) {
        const double rho = std::sqrt(lo * lo + uniform(rng) * (hi * hi - lo * lo));
        const PointRef p = polar(rho, phi0 + width * uniform(rng));
        if (distance(center, p) <= radius) {
          out.push_back(p);
          break;
        }
        if (attempt > 100000) throw Error(ErrorKind::EmptyBall, "cone ball sampling failed");
      }
    }
    return out;
  }

  /// "rho,phi" with phi taken modulo the cone angle.
  PointRef parse_point(std::string_view text) const override {
    const auto [rho, phi] = detail::parse_pair(text);
    if (rho < 0.0) throw Error(ErrorKind::MalformedInput, "rho must be >= 0");
    return polar(rho, phi);
  }

  std::string format_point(const PointRef& x) const override {
    return detail::format_double(x.coords.x) + "," + detail::format_double(x.coords.y);
  }

  PointRef polar(double rho, double phi) const {
    if (rho == 0.0) return apex();
    double p = std::fmod(phi, angle_);
    if (p < 0.0) p += angle_;
    if (p >= angle_) p = 0.0;
    return PointRef{-1, {rho, p, 0.0}};
  }
  static PointRef apex() { return PointRef{}; }

 protected:
  PointRef interpolate(const PointRef& a, const PointRef& b, double length,
                       double t) const override {
    const double ra = a.coords.x, rb = b.coords.x;
    if (ra == 0.0) return polar(t, b.coords.y);
    if (rb == 0.0) return polar(ra - t, a.coords.y);
    // Unroll with a on the positive axis.
    const double gap = signed_gap(a, b);
    const double s = t / length;
    const double x = ra + s * (rb * std::cos(gap) - ra);
    const double y = s * rb * std::sin(gap);
    const double rho = std::hypot(x, y);
    return polar(rho, a.coords.y + std::atan2(y, x));
  }

 private:
  // Angular offset from x to y along the shorter way around, in
  // (-angle/2, angle/2].
  double signed_gap(const PointRef& x, const PointRef& y) const {
    if (x.coords.x == 0.0 || y.coords.x == 0.0) return 0.0;
    double d = std::fmod(y.coords.y - x.coords.y, angle_);
    if (d > 0.5 * angle_) d -= angle_;
    if (d <= -0.5 * angle_) d += angle_;
    return d;
  }

  double angle_;
  double extent_;
};

}  // namespace

SpacePtr make_plane(double extent, double resolution) {
  return std::make_shared<PlaneSpace>(extent, resolution);
}

SpacePtr make_sphere(double radius, double resolution) {
  return std::make_shared<SphereSpace>(radius, resolution);
}

SpacePtr make_hyperbolic(double extent, double resolution) {
  return std::make_shared<HyperbolicSpace>(extent, resolution);
}

SpacePtr make_cone(double angle, double resolution, double extent) {
  return std::make_shared<ConeSpace>(angle, resolution, extent);
}

}  // namespace alexcmp
