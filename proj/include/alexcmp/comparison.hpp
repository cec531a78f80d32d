#pragma once

// Angles measured in a geodesic space, compared against the comparison angles
// of the model surface of curvature k.
//
// The angle between two geodesics leaving q is estimated at a probe scale t as
// the comparison angle of the small triangle (x, q, y), where x and y sit at
// arclength t along the two geodesics. The same t is used on both sides.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "alexcmp/metricspace.hpp"
#include "alexcmp/spaceform.hpp"

namespace alexcmp::comparison {

using spaceform::CurvatureParam;
using spaceform::Vertex;

/// Three points joined by three shortest paths.
struct Triangle {
  PointRef p, q, r;
  GeodesicPolyline pq, pr, qr;

  spaceform::SideTriple sides() const {
    return spaceform::SideTriple::from_lengths(pq.total, pr.total, qr.total);
  }
  double perimeter() const { return pq.total + pr.total + qr.total; }
  const PointRef& vertex(Vertex v) const;
};

/// Throws Error(OutOfRegime) when k > 0 and the perimeter is not below
/// 2pi/sqrt(k) - tau_eq.
Triangle make_triangle(const MetricSpace& space, const CurvatureParam& k, const PointRef& p,
                       const PointRef& q, const PointRef& r,
                       double slack_rel = spaceform::kDefaultSlack);

/// The two geodesics leaving a vertex, ordered as (towards the alphabetically
/// first other vertex, towards the second).
std::pair<GeodesicPolyline, GeodesicPolyline> corner(const Triangle& tri, Vertex v);

struct AngleEstimate {
  double value = 0.0;
  double scale = 0.0;
  PointRef vertex;
  /// (scale, estimate) for t, t/2, t/4, ... down to the probe floor.
  std::vector<std::pair<double, double>> sequence;
};

/// 10h for discrete backends, 1e-4 times the shorter geodesic for analytic
/// ones; never longer than the shorter geodesic.
double default_probe(const MetricSpace& space, double shorter_length);
/// 5h for discrete backends, 1e-6 for analytic ones.
double default_tolerance(const MetricSpace& space);

/// Throws Error(RangeError) unless 0 < t <= min(lengths), and
/// Error(DegenerateGeodesic) for a zero-length geodesic.
AngleEstimate measure_angle(const MetricSpace& space, const CurvatureParam& k, const PointRef& q,
                            const GeodesicPolyline& to_p, const GeodesicPolyline& to_r, double t);

/// Measured and comparison angle at one triangle vertex.
struct VertexAngles {
  AngleEstimate measured;
  double comparison = 0.0;
  double deficit() const { return comparison - measured.value; }
};

/// `probe` <= 0 selects default_probe.
VertexAngles vertex_angles(const MetricSpace& space, const CurvatureParam& k, const Triangle& tri,
                           Vertex v, double probe = 0.0);

struct BadAngleCertificate {
  Triangle triangle;
  Vertex vertex = Vertex::Q;
  AngleEstimate measured;
  double comparison = 0.0;
  double deficit = 0.0;
  double tolerance = 0.0;
};

/// A certificate iff measured < comparison - tol.
std::optional<BadAngleCertificate> badness(const MetricSpace& space, const CurvatureParam& k,
                                           const Triangle& tri, Vertex v, double tol,
                                           double probe = 0.0);

/// Worst certificate over the three vertices, if any.
std::optional<BadAngleCertificate> worst_badness(const MetricSpace& space, const CurvatureParam& k,
                                                 const Triangle& tri, double tol);

struct LocalReport {
  bool good = true;
  std::optional<BadAngleCertificate> worst;
  std::size_t triangles = 0;
  std::size_t bad_triangles = 0;
};

/// Samples `budget` triangles with vertices in B(o, radius) (pairwise at least
/// 2h apart) and reports the worst bad angle. The first n triangles do not
/// depend on the budget. Throws Error(InvalidArgument) when radius <= 2h and
/// Error(EmptyBall) when no admissible triangle can be drawn.
LocalReport local_check(const MetricSpace& space, const CurvatureParam& k, const PointRef& o,
                        double radius, std::size_t budget, double tol, std::uint64_t seed);

struct AdjacentAngles {
  PointRef r;
  double angle_p = 0.0;  // angle between [rp] and [rr']
  double angle_q = 0.0;  // angle between [rq] and [rr']
  double sum = 0.0;
  double scale = 0.0;
};

/// r is the point at arclength s along the geodesic pq. Throws
/// Error(NotInterior) unless r is strictly inside. `t` <= 0 selects the
/// default probe.
AdjacentAngles adjacent_angle_check(const MetricSpace& space, const CurvatureParam& k,
                                    const GeodesicPolyline& pq, double s, const PointRef& r_prime,
                                    double t = 0.0);

struct FirstVariationSample {
  double t = 0.0;         // actual arclength of q_t along [qr]
  double residual = 0.0;  // |p q_t| - |pq| + cos(angle pqr) t
  double ratio = 0.0;     // residual / t
};

struct FirstVariationReport {
  double angle = 0.0;
  std::vector<FirstVariationSample> samples;  // ordered by decreasing t
  /// |residual/t| is nonincreasing as t decreases.
  bool decreasing = true;
};

FirstVariationReport first_variation_check(const MetricSpace& space, const CurvatureParam& k,
                                           const PointRef& p, const PointRef& q, const PointRef& r,
                                           std::vector<double> scales);

}  // namespace alexcmp::comparison
