#include "alexcmp/spaceform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "alexcmp/error.hpp"

namespace alexcmp::spaceform {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kClamp = 1e-12;

// sin, identity or sinh depending on the sign of the curvature; lengths are
// already scaled by sqrt|k|.
double sn(const CurvatureParam& k, double x) {
  if (k.spherical()) return std::sin(x);
  if (k.hyperbolic()) return std::sinh(x);
  return x;
}

double scale(const CurvatureParam& k) { return k.flat() ? 1.0 : std::sqrt(std::abs(k.k())); }

std::string describe(const SideTriple& s) {
  std::ostringstream os;
  os.precision(17);
  os << "(a=" << s.a << ", b=" << s.b << ", c=" << s.c << ")";
  return os.str();
}

struct Incidence {
  double x;    // incident
  double y;    // incident
  double opp;  // opposite
};

Incidence incidence(const SideTriple& s, Vertex v) {
  switch (v) {
    case Vertex::P: return {s.b, s.c, s.a};
    case Vertex::Q: return {s.a, s.c, s.b};
    case Vertex::R: return {s.a, s.b, s.c};
  }
  return {s.a, s.b, s.c};
}

}  // namespace

CurvatureParam::CurvatureParam(double k) : k_(k) {
  if (!std::isfinite(k)) throw Error(ErrorKind::InvalidArgument, "curvature must be finite");
}

double CurvatureParam::diameter() const noexcept {
  return spherical() ? kPi / std::sqrt(k_) : std::numeric_limits<double>::infinity();
}

double CurvatureParam::perimeter_bound() const noexcept {
  return spherical() ? 2.0 * kPi / std::sqrt(k_) : std::numeric_limits<double>::infinity();
}

double CurvatureParam::radius() const noexcept {
  return flat() ? std::numeric_limits<double>::infinity() : 1.0 / std::sqrt(std::abs(k_));
}

std::string_view to_string(Vertex v) {
  switch (v) {
    case Vertex::P: return "p";
    case Vertex::Q: return "q";
    case Vertex::R: return "r";
  }
  return "?";
}

double SideTriple::opposite(Vertex v) const {
  switch (v) {
    case Vertex::P: return a;
    case Vertex::Q: return b;
    case Vertex::R: return c;
  }
  return a;
}

ModelPoint model_origin(const CurvatureParam& k) {
  return k.flat() ? ModelPoint{} : ModelPoint{0.0, 0.0, k.radius()};
}

ModelPoint model_point_polar(const CurvatureParam& k, double rho, double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  if (k.flat()) return {rho * c, rho * s, 0.0};
  const double R = k.radius();
  const double u = rho / R;
  if (k.spherical()) return {R * std::sin(u) * c, R * std::sin(u) * s, R * std::cos(u)};
  return {R * std::sinh(u) * c, R * std::sinh(u) * s, R * std::cosh(u)};
}

double model_distance(const CurvatureParam& k, const ModelPoint& u, const ModelPoint& v) {
  if (k.flat()) return norm(u - v);
  const double R = k.radius();
  if (k.spherical()) return R * std::atan2(norm(cross(u, v)), dot(u, v));
  // The Lorentzian chord |u - v| equals 2R sinh(d / 2R).
  const Vec3 w = u - v;
  const double chord2 = std::max(0.0, minkowski(w, w));
  return 2.0 * R * std::asinh(std::sqrt(chord2) / (2.0 * R));
}

double side_from_angle(const CurvatureParam& k, double a, double b, double gamma) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw Error(ErrorKind::DomainError, "side lengths must be >= 0");
  if (gamma < -kClamp || gamma > kPi + kClamp || !std::isfinite(gamma)) {
    throw Error(ErrorKind::DomainError, "angle must lie in [0, pi]");
  }
  gamma = std::clamp(gamma, 0.0, kPi);
  if (k.spherical()) {
    const double D = k.diameter();
    const double limit = D * (1.0 + kClamp);
    if (a > limit || b > limit) throw Error(ErrorKind::DomainError, "side exceeds pi/sqrt(k)");
    a = std::min(a, D);
    b = std::min(b, D);
  }
  const double half = std::sin(0.5 * gamma);
  const double half_c = std::cos(0.5 * gamma);
  if (k.flat()) {
    const double d = a - b;
    return std::sqrt(d * d + 4.0 * a * b * half * half);
  }
  const double sk = scale(k);
  const double A = a * sk;
  const double B = b * sk;
  if (k.spherical()) {
    // Haversine form; both h and 1 - h are sums of nonnegative terms.
    const double sd = std::sin(0.5 * (A - B));
    const double cs = std::cos(0.5 * (A + B));
    const double sab = std::sin(A) * std::sin(B);
    const double h = sd * sd + sab * half * half;
    const double one_minus_h = cs * cs + sab * half_c * half_c;
    return 2.0 * std::atan2(std::sqrt(std::max(0.0, h)), std::sqrt(std::max(0.0, one_minus_h))) / sk;
  }
  const double sd = std::sinh(0.5 * (A - B));
  const double h = sd * sd + std::sinh(A) * std::sinh(B) * half * half;
  return 2.0 * std::asinh(std::sqrt(std::max(0.0, h))) / sk;
}

void validate_triple(const CurvatureParam& k, const SideTriple& s, double slack_rel) {
  if (!(s.a >= 0.0) || !(s.b >= 0.0) || !(s.c >= 0.0) || !std::isfinite(s.perimeter())) {
    throw Error(ErrorKind::InvalidTriple, "side lengths must be finite and >= 0 " + describe(s));
  }
  const double tau = slack_rel * s.perimeter();
  if (s.a > s.b + s.c + tau || s.b > s.a + s.c + tau || s.c > s.a + s.b + tau) {
    throw Error(ErrorKind::InvalidTriple, "triangle inequality fails " + describe(s));
  }
  if (k.spherical()) {
    const double D = k.diameter();
    if (s.a > D + tau || s.b > D + tau || s.c > D + tau) {
      throw Error(ErrorKind::InvalidTriple, "side exceeds pi/sqrt(k) " + describe(s));
    }
    if (s.perimeter() > k.perimeter_bound() + tau) {
      throw Error(ErrorKind::InvalidTriple, "perimeter exceeds 2pi/sqrt(k) " + describe(s));
    }
  }
}

double comparison_angle(const CurvatureParam& k, const SideTriple& sides, Vertex vertex,
                        double slack_rel) {
  validate_triple(k, sides, slack_rel);
  const auto [x0, y0, c0] = incidence(sides, vertex);
  if (k.spherical()) {
    const double tau = slack_rel * sides.perimeter();
    const double D = k.diameter();
    if (x0 >= D - tau || y0 >= D - tau) return 0.0;
    if (c0 >= D - tau) return kPi;
  }
  const double sk = scale(k);
  const double x = x0 * sk;
  const double y = y0 * sk;
  const double c = c0 * sk;
  const double upper = k.spherical() ? kPi : std::numeric_limits<double>::infinity();
  auto f = [&](double arg) { return sn(k, std::clamp(arg, 0.0, upper)); };
  // Half-angle form: tan^2(gamma/2) = sn((c+x-y)/2) sn((c-x+y)/2)
  //                                  / (sn((x+y+c)/2) sn((x+y-c)/2)).
  // Written in d = x - y and s = x + y so swapping the incident sides gives a
  // bitwise identical result.
  const double d = x - y;
  const double s = x + y;
  const double num = f(0.5 * (c + d)) * f(0.5 * (c - d));
  const double den = f(0.5 * (s + c)) * f(0.5 * (s - c));
  return 2.0 * std::atan2(std::sqrt(std::max(0.0, num)), std::sqrt(std::max(0.0, den)));
}

ComparisonTriangle build_comparison_triangle(const CurvatureParam& k, const SideTriple& sides,
                                             double slack_rel) {
  ComparisonTriangle tri{k, sides, {}, {}};
  for (Vertex v : {Vertex::P, Vertex::Q, Vertex::R}) {
    tri.angles[static_cast<int>(v)] = comparison_angle(k, sides, v, slack_rel);
  }
  tri.coords[static_cast<int>(Vertex::Q)] = model_origin(k);
  tri.coords[static_cast<int>(Vertex::R)] = model_point_polar(k, sides.a, 0.0);
  tri.coords[static_cast<int>(Vertex::P)] = model_point_polar(k, sides.c, tri.angle(Vertex::Q));
  return tri;
}

double distance_to_side_point(const ComparisonTriangle& tri, Vertex apex, double t) {
  Vertex first = Vertex::Q;
  Vertex second = Vertex::R;
  if (apex == Vertex::Q) {
    first = Vertex::P;
  } else if (apex == Vertex::R) {
    first = Vertex::P;
    second = Vertex::Q;
  }
  const double length = tri.sides.opposite(apex);
  const double eps = kClamp * std::max(1.0, length);
  if (!(t >= -eps) || !(t <= length + eps)) {
    throw Error(ErrorKind::RangeError, "parameter outside the side");
  }
  // The side from `first` to `second` is opposite the third vertex, which is
  // the apex; the apex-to-endpoint sides are the ones opposite the endpoints
  // swapped.
  const double to_first = tri.sides.opposite(second);
  const double to_second = tri.sides.opposite(first);
  if (t <= 0.0) return to_first;
  if (t >= length) return to_second;
  return side_from_angle(tri.k, to_first, t, tri.angle(first));
}

std::string_view to_string(GluingVerdict v) {
  switch (v) {
    case GluingVerdict::SumLeqPi: return "SUM_LEQ_PI";
    case GluingVerdict::SumGeqPi: return "SUM_GEQ_PI";
    case GluingVerdict::Both: return "BOTH";
  }
  return "?";
}

bool AlexandrovComparison::consistent(double eps) const {
  const double d[3] = {kPi - angle_sum, angle_prq - angle_abc, angle_psq - angle_acb};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (d[i] > eps && d[j] < -eps) return false;
    }
  }
  return true;
}

AlexandrovComparison alexandrov_compare(const CurvatureParam& k, double pq, double qr, double qs,
                                        double pr, double ps, double slack_rel,
                                        double verdict_eps) {
  if (k.spherical()) {
    const double total = pr + ps + qr + qs;
    if (total > k.perimeter_bound() + slack_rel * total) {
      throw Error(ErrorKind::InvalidTriple, "glued perimeter exceeds 2pi/sqrt(k)");
    }
  }
  const auto pqr = SideTriple::from_lengths(pq, pr, qr);
  const auto pqs = SideTriple::from_lengths(pq, ps, qs);
  // a -> P, b -> Q, c -> R.
  const auto abc = SideTriple::from_lengths(pr, ps, qr + qs);

  AlexandrovComparison out;
  out.angle_pqr = comparison_angle(k, pqr, Vertex::Q, slack_rel);
  out.angle_prq = comparison_angle(k, pqr, Vertex::R, slack_rel);
  out.angle_pqs = comparison_angle(k, pqs, Vertex::Q, slack_rel);
  out.angle_psq = comparison_angle(k, pqs, Vertex::R, slack_rel);
  out.angle_abc = comparison_angle(k, abc, Vertex::Q, slack_rel);
  out.angle_acb = comparison_angle(k, abc, Vertex::R, slack_rel);
  out.angle_sum = out.angle_pqr + out.angle_pqs;
  const double diff = out.angle_sum - kPi;
  if (std::abs(diff) <= verdict_eps) {
    out.verdict = GluingVerdict::Both;
  } else {
    out.verdict = diff < 0.0 ? GluingVerdict::SumLeqPi : GluingVerdict::SumGeqPi;
  }
  return out;
}

}  // namespace alexcmp::spaceform
