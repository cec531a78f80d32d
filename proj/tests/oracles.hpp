#pragma once

// Independent reference formulas used by the tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <tuple>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

// Classical law of cosines solved for the angle opposite c.
inline double angle_opposite(double k, double a, double b, double c) {
  using L = long double;
  L cg;
  if (k == 0.0) {
    cg = (L(a) * a + L(b) * b - L(c) * c) / (2 * L(a) * b);
  } else if (k > 0.0) {
    const L s = std::sqrt(L(k));
    cg = (std::cos(s * c) - std::cos(s * a) * std::cos(s * b)) / (std::sin(s * a) * std::sin(s * b));
  } else {
    const L s = std::sqrt(L(-k));
    cg = (std::cosh(s * a) * std::cosh(s * b) - std::cosh(s * c)) /
         (std::sinh(s * a) * std::sinh(s * b));
  }
  return static_cast<double>(std::acos(std::clamp(cg, L(-1), L(1))));
}

inline double side_opposite(double k, double a, double b, double gamma) {
  using L = long double;
  if (k == 0.0) {
    return static_cast<double>(std::sqrt(std::max(L(0), L(a) * a + L(b) * b - 2 * L(a) * b * std::cos(L(gamma)))));
  }
  if (k > 0.0) {
    const L s = std::sqrt(L(k));
    const L c = std::cos(s * a) * std::cos(s * b) + std::sin(s * a) * std::sin(s * b) * std::cos(L(gamma));
    return static_cast<double>(std::acos(std::clamp(c, L(-1), L(1))) / s);
  }
  const L s = std::sqrt(L(-k));
  const L c = std::cosh(s * a) * std::cosh(s * b) - std::sinh(s * a) * std::sinh(s * b) * std::cos(L(gamma));
  return static_cast<double>(std::acosh(std::max(c, L(1))) / s);
}

// Poincare-disk distance (curvature -1) between points given in geodesic polar
// coordinates about the disk center.
inline double poincare_distance(double rho1, double phi1, double rho2, double phi2) {
  const double r1 = std::tanh(rho1 / 2), r2 = std::tanh(rho2 / 2);
  const double x1 = r1 * std::cos(phi1), y1 = r1 * std::sin(phi1);
  const double x2 = r2 * std::cos(phi2), y2 = r2 * std::sin(phi2);
  const double d2 = (x1 - x2) * (x1 - x2) + (y1 - y2) * (y1 - y2);
  return std::acosh(1 + 2 * d2 / ((1 - r1 * r1) * (1 - r2 * r2)));
}

// Great-circle distance on a sphere of radius R, latitude/longitude in degrees.
inline double haversine(double R, double lat1, double lon1, double lat2, double lon2) {
  const double d = pi / 180.0;
  const double a = std::pow(std::sin((lat2 - lat1) * d / 2), 2) +
                   std::cos(lat1 * d) * std::cos(lat2 * d) * std::pow(std::sin((lon2 - lon1) * d / 2), 2);
  return 2 * R * std::asin(std::min(1.0, std::sqrt(a)));
}

// Flat cone of total angle theta, points in (rho, phi): unroll the sector.
inline double cone_distance(double theta, double rho1, double phi1, double rho2, double phi2) {
  double gap = std::fmod(std::fabs(phi1 - phi2), theta);
  gap = std::min(gap, theta - gap);
  if (gap >= pi) return rho1 + rho2;
  return std::sqrt(std::max(0.0, rho1 * rho1 + rho2 * rho2 - 2 * rho1 * rho2 * std::cos(gap)));
}

// Angle at s = (rho, phi) between the cone geodesics towards x and y, read off
// the sector unrolled around s.
inline double cone_angle(double theta, double rho, double phi, double rx, double fx, double ry, double fy) {
  auto gap = [&](double a, double b) {
    double d = std::fmod(b - a, theta);
    if (d < 0) d += theta;
    return d > theta / 2 ? d - theta : d;  // signed, in (-theta/2, theta/2]
  };
  if (rho == 0.0) {
    const double d = std::fabs(gap(fx, fy));
    return std::min(d, pi);
  }
  auto direction = [&](double r, double f, double& dx, double& dy) {
    const double g = gap(phi, f);
    if (r == 0.0 || std::fabs(g) >= pi) {
      dx = -1;
      dy = 0;
      return;
    }
    dx = r * std::cos(g) - rho;
    dy = r * std::sin(g);
  };
  double ax, ay, bx, by;
  direction(rx, fx, ax, ay);
  direction(ry, fy, bx, by);
  return std::acos(std::clamp((ax * bx + ay * by) / (std::hypot(ax, ay) * std::hypot(bx, by)), -1.0, 1.0));
}

// All-pairs shortest paths.
inline std::vector<std::vector<double>> floyd_warshall(
    std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& [u, v, w] : edges) {
    d[u][v] = std::min(d[u][v], w);
    d[v][u] = std::min(d[v][u], w);
  }
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][m] + d[m][j]);
  return d;
}

// Random triangle with sides below `max_side`, perimeter below `max_perimeter`,
// built from two sides and the enclosed angle.
struct Sides {
  double pq, pr, qr;
};

template <class Rng>
Sides random_sides(double k, Rng& rng, double max_side, double max_perimeter) {
  std::uniform_real_distribution<double> len(0.05, max_side), ang(0.05, pi - 0.05);
  for (;;) {
    const double pq = len(rng), qr = len(rng), gamma = ang(rng);
    const double pr = side_opposite(k, pq, qr, gamma);
    if (pq + pr + qr < max_perimeter && pr > 1e-3) return {pq, pr, qr};
  }
}

}  // namespace oracle
