#include "alexcmp/comparison.hpp"

#include <algorithm>
#include <cmath>

#include "alexcmp/error.hpp"

namespace alexcmp::comparison {

namespace {

constexpr int kMaxSequence = 16;

// Point at arclength t, skipping the starting vertex itself when a coarse
// discrete path would otherwise return it.
Located probe_point(const MetricSpace& space, const GeodesicPolyline& g, double t) {
  Located loc = space.locate(g, t);
  if (loc.arclength <= 0.0 && g.points.size() > 1) return {g.points[1], g.cum[1]};
  return loc;
}

double estimate_at(const MetricSpace& space, const CurvatureParam& k, const PointRef& q,
                   const GeodesicPolyline& to_p, const GeodesicPolyline& to_r, double t) {
  const Located x = probe_point(space, to_p, t);
  const Located y = probe_point(space, to_r, t);
  const double qx = space.distance(q, x.point);
  const double qy = space.distance(q, y.point);
  const double xy = space.distance(x.point, y.point);
  // Sides of (x, q, y) with the vertex of interest in the Q slot.
  const auto sides = spaceform::SideTriple::from_lengths(qx, xy, qy);
  return spaceform::comparison_angle(k, sides, Vertex::Q);
}

}  // namespace

const PointRef& Triangle::vertex(Vertex v) const {
  switch (v) {
    case Vertex::P: return p;
    case Vertex::Q: return q;
    case Vertex::R: return r;
  }
  return q;
}

Triangle make_triangle(const MetricSpace& space, const CurvatureParam& k, const PointRef& p,
                       const PointRef& q, const PointRef& r, double slack_rel) {
  Triangle tri{p, q, r, space.geodesic(p, q), space.geodesic(p, r), space.geodesic(q, r)};
  if (k.spherical()) {
    const double perim = tri.perimeter();
    if (perim >= k.perimeter_bound() - slack_rel * perim) {
      throw Error(ErrorKind::OutOfRegime, "perimeter is not below 2pi/sqrt(k)");
    }
  }
  return tri;
}

std::pair<GeodesicPolyline, GeodesicPolyline> corner(const Triangle& tri, Vertex v) {
  switch (v) {
    case Vertex::P: return {tri.pq, tri.pr};
    case Vertex::Q: return {reversed(tri.pq), tri.qr};
    case Vertex::R: return {reversed(tri.pr), reversed(tri.qr)};
  }
  return {tri.pq, tri.pr};
}

double default_probe(const MetricSpace& space, double shorter_length) {
  const double t = space.analytic() ? 1e-4 * shorter_length : 10.0 * space.resolution();
  return std::min(t, shorter_length);
}

double default_tolerance(const MetricSpace& space) {
  return space.analytic() ? 1e-6 : 5.0 * space.resolution();
}

AngleEstimate measure_angle(const MetricSpace& space, const CurvatureParam& k, const PointRef& q,
                            const GeodesicPolyline& to_p, const GeodesicPolyline& to_r, double t) {
  if (to_p.points.empty() || to_r.points.empty() || !space.same_point(to_p.front(), q) ||
      !space.same_point(to_r.front(), q)) {
    throw Error(ErrorKind::InvalidArgument, "geodesics must start at the vertex");
  }
  if (to_p.total <= 0.0 || to_r.total <= 0.0) {
    throw Error(ErrorKind::DegenerateGeodesic, "zero-length geodesic at the vertex");
  }
  const double shorter = std::min(to_p.total, to_r.total);
  if (!(t > 0.0) || t > shorter * (1.0 + 1e-12)) {
    throw Error(ErrorKind::RangeError, "probe scale must lie in (0, shorter geodesic]");
  }
  t = std::min(t, shorter);

  AngleEstimate est;
  est.vertex = q;
  est.scale = t;
  const double floor = space.analytic() ? t * std::ldexp(1.0, -10) : space.resolution();
  double s = t;
  for (int i = 0; i < kMaxSequence && (i == 0 || s >= floor); ++i, s *= 0.5) {
    est.sequence.emplace_back(s, estimate_at(space, k, q, to_p, to_r, s));
  }
  est.value = est.sequence.front().second;
  return est;
}

VertexAngles vertex_angles(const MetricSpace& space, const CurvatureParam& k, const Triangle& tri,
                           Vertex v, double probe) {
  const auto [a, b] = corner(tri, v);
  const double t = probe > 0.0 ? probe : default_probe(space, std::min(a.total, b.total));
  VertexAngles out;
  out.measured = measure_angle(space, k, tri.vertex(v), a, b, t);
  out.comparison = spaceform::comparison_angle(k, tri.sides(), v);
  return out;
}

std::optional<BadAngleCertificate> badness(const MetricSpace& space, const CurvatureParam& k,
                                           const Triangle& tri, Vertex v, double tol,
                                           double probe) {
  const VertexAngles va = vertex_angles(space, k, tri, v, probe);
  const double deficit = va.deficit();
  if (!(deficit > tol)) return std::nullopt;
  return BadAngleCertificate{tri, v, va.measured, va.comparison, deficit, tol};
}

std::optional<BadAngleCertificate> worst_badness(const MetricSpace& space, const CurvatureParam& k,
                                                 const Triangle& tri, double tol) {
  std::optional<BadAngleCertificate> worst;
  for (Vertex v : {Vertex::P, Vertex::Q, Vertex::R}) {
    auto cert = badness(space, k, tri, v, tol);
    if (cert && (!worst || cert->deficit > worst->deficit)) worst = std::move(cert);
  }
  return worst;
}

LocalReport local_check(const MetricSpace& space, const CurvatureParam& k, const PointRef& o,
                        double radius, std::size_t budget, double tol, std::uint64_t seed) {
  const double h = space.resolution();
  if (!(radius > 2.0 * h)) {
    throw Error(ErrorKind::InvalidArgument, "ball radius must exceed twice the resolution");
  }
  if (budget == 0) throw Error(ErrorKind::InvalidArgument, "sample budget must be positive");
  const std::size_t attempts = 20 * budget;
  Rng rng(seed);
  const std::vector<PointRef> pts = space.sample_ball(o, radius, 3 * attempts, rng);

  LocalReport report;
  for (std::size_t i = 0; i < attempts && report.triangles < budget; ++i) {
    const PointRef& a = pts[3 * i];
    const PointRef& b = pts[3 * i + 1];
    const PointRef& c = pts[3 * i + 2];
    if (space.distance(a, b) < 2.0 * h || space.distance(a, c) < 2.0 * h ||
        space.distance(b, c) < 2.0 * h) {
      continue;
    }
    Triangle tri;
    try {
      tri = make_triangle(space, k, a, b, c);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::OutOfRegime) continue;
      throw;
    }
    ++report.triangles;
    auto cert = worst_badness(space, k, tri, tol);
    if (!cert) continue;
    ++report.bad_triangles;
    if (!report.worst || cert->deficit > report.worst->deficit) report.worst = std::move(cert);
  }
  if (report.triangles == 0) {
    throw Error(ErrorKind::EmptyBall, "no admissible triangle inside the ball");
  }
  report.good = !report.worst.has_value();
  return report;
}

AdjacentAngles adjacent_angle_check(const MetricSpace& space, const CurvatureParam& k,
                                    const GeodesicPolyline& pq, double s, const PointRef& r_prime,
                                    double t) {
  if (!(s > 0.0) || !(s < pq.total)) throw Error(ErrorKind::NotInterior, "r must be inside [pq]");
  const Located loc = space.locate(pq, s);
  if (space.same_point(loc.point, pq.front()) || space.same_point(loc.point, pq.back())) {
    throw Error(ErrorKind::NotInterior, "r coincides with an endpoint of [pq]");
  }
  const GeodesicPolyline to_p = space.subpath(pq, loc.arclength, 0.0);
  const GeodesicPolyline to_q = space.subpath(pq, loc.arclength, pq.total);
  const GeodesicPolyline to_rp = space.geodesic(loc.point, r_prime);
  if (t <= 0.0) {
    t = default_probe(space, std::min({to_p.total, to_q.total, to_rp.total}));
  }
  AdjacentAngles out;
  out.r = loc.point;
  out.scale = t;
  out.angle_p = measure_angle(space, k, loc.point, to_p, to_rp, t).value;
  out.angle_q = measure_angle(space, k, loc.point, to_q, to_rp, t).value;
  out.sum = out.angle_p + out.angle_q;
  return out;
}

FirstVariationReport first_variation_check(const MetricSpace& space, const CurvatureParam& k,
                                           const PointRef& p, const PointRef& q, const PointRef& r,
                                           std::vector<double> scales) {
  const GeodesicPolyline qp = space.geodesic(q, p);
  const GeodesicPolyline qr = space.geodesic(q, r);
  FirstVariationReport out;
  out.angle =
      measure_angle(space, k, q, qp, qr, default_probe(space, std::min(qp.total, qr.total))).value;
  const double c = std::cos(out.angle);
  std::sort(scales.begin(), scales.end(), std::greater<>());
  for (const double t : scales) {
    if (!(t > 0.0)) throw Error(ErrorKind::RangeError, "scales must be positive");
    const Located qt = space.locate(qr, t);
    if (qt.arclength <= 0.0) throw Error(ErrorKind::RangeError, "scale below the path resolution");
    FirstVariationSample sample;
    sample.t = qt.arclength;
    sample.residual = space.distance(p, qt.point) - qp.total + c * sample.t;
    sample.ratio = sample.residual / sample.t;
    out.samples.push_back(sample);
  }
  for (std::size_t i = 1; i < out.samples.size(); ++i) {
    if (std::abs(out.samples[i].ratio) > std::abs(out.samples[i - 1].ratio) + 1e-15) {
      out.decreasing = false;
    }
  }
  return out;
}

}  // namespace alexcmp::comparison
