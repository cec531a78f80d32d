#pragma once

// Trigonometry and comparison constructions in the model surfaces of constant
// curvature k (hyperbolic plane, Euclidean plane, round sphere of radius
// 1/sqrt(k)).
//
// Model points are stored as embedded coordinates: the plane is z = 0, the
// sphere is the sphere of radius 1/sqrt(k) in R^3 and the hyperbolic plane is
// the upper sheet of x^2 + y^2 - z^2 = -1/|k|. The chart origin is (0,0,0) for
// k = 0 and (0,0,1/sqrt|k|) otherwise.

#include <array>
#include <cstdint>
#include <string_view>

#include "alexcmp/vec3.hpp"

namespace alexcmp::spaceform {

/// |k| below this is evaluated with the Euclidean formulas.
inline constexpr double kFlatThreshold = 1e-12;
/// Default realizability slack, relative to the triangle perimeter.
inline constexpr double kDefaultSlack = 1e-9;

class CurvatureParam {
 public:
  /// Throws Error(InvalidArgument) for non-finite k.
  explicit CurvatureParam(double k = 0.0);

  double k() const noexcept { return k_; }
  bool spherical() const noexcept { return k_ >= kFlatThreshold; }
  bool flat() const noexcept { return !spherical() && !hyperbolic(); }
  bool hyperbolic() const noexcept { return k_ <= -kFlatThreshold; }

  /// pi/sqrt(k) for k > 0, +inf otherwise.
  double diameter() const noexcept;
  /// 2pi/sqrt(k) for k > 0, +inf otherwise.
  double perimeter_bound() const noexcept;
  /// 1/sqrt(|k|); +inf in the flat case.
  double radius() const noexcept;

 private:
  double k_;
};

enum class Vertex : std::uint8_t { P, Q, R };

std::string_view to_string(Vertex v);

/// Side lengths labelled by the opposite vertex: a = |qr|, b = |pr|, c = |pq|.
struct SideTriple {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  static SideTriple from_lengths(double pq, double pr, double qr) { return {qr, pr, pq}; }

  double opposite(Vertex v) const;
  double perimeter() const { return a + b + c; }
};

using ModelPoint = Vec3;

ModelPoint model_origin(const CurvatureParam& k);

/// Point at distance rho from the chart origin in direction phi.
ModelPoint model_point_polar(const CurvatureParam& k, double rho, double phi);

double model_distance(const CurvatureParam& k, const ModelPoint& u, const ModelPoint& v);

/// Third side of the model triangle with sides a, b enclosing the angle gamma.
double side_from_angle(const CurvatureParam& k, double a, double b, double gamma);

/// Throws Error(InvalidTriple) when the triple is not realizable in the model
/// surface beyond tau_eq = slack_rel * perimeter.
void validate_triple(const CurvatureParam& k, const SideTriple& sides,
                     double slack_rel = kDefaultSlack);

/// Angle at `vertex` of the model triangle with the given sides, in [0, pi].
///
/// For k > 0 a side equal to pi/sqrt(k) is allowed. If such a side is incident
/// to the vertex the angle is 0 by convention; if it is the opposite side the
/// vertex lies on a minimal geodesic between antipodes and the angle is pi.
double comparison_angle(const CurvatureParam& k, const SideTriple& sides, Vertex vertex,
                        double slack_rel = kDefaultSlack);

struct ComparisonTriangle {
  CurvatureParam k;
  SideTriple sides;
  std::array<double, 3> angles{};       // indexed by Vertex
  std::array<ModelPoint, 3> coords{};   // indexed by Vertex

  double angle(Vertex v) const { return angles[static_cast<int>(v)]; }
  const ModelPoint& coord(Vertex v) const { return coords[static_cast<int>(v)]; }
};

/// Canonical placement: q at the chart origin, r on the positive x axis and p
/// in the upper half (y >= 0).
ComparisonTriangle build_comparison_triangle(const CurvatureParam& k, const SideTriple& sides,
                                             double slack_rel = kDefaultSlack);

/// Distance from the apex to the point at arclength t along the opposite side.
/// The opposite side runs q->r for apex p, p->r for apex q and p->q for apex r.
double distance_to_side_point(const ComparisonTriangle& tri, Vertex apex, double t);

enum class GluingVerdict : std::uint8_t { SumLeqPi, SumGeqPi, Both };

std::string_view to_string(GluingVerdict v);

/// Two model triangles pqr and pqs glued along [pq] on opposite sides, and the
/// triangle abc with |ab| = |pr|, |ac| = |ps|, |bc| = |qr| + |qs|.
struct AlexandrovComparison {
  GluingVerdict verdict = GluingVerdict::Both;
  double angle_pqr = 0.0;
  double angle_pqs = 0.0;
  double angle_sum = 0.0;
  double angle_prq = 0.0;
  double angle_abc = 0.0;
  double angle_psq = 0.0;
  double angle_acb = 0.0;

  /// True when the three signs (pi - sum), (prq - abc), (psq - acb) never
  /// disagree strictly by more than eps.
  bool consistent(double eps) const;
};

AlexandrovComparison alexandrov_compare(const CurvatureParam& k, double pq, double qr, double qs,
                                        double pr, double ps, double slack_rel = kDefaultSlack,
                                        double verdict_eps = 1e-12);

}  // namespace alexcmp::spaceform
