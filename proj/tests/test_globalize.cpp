#include <doctest.h>

#include <cmath>
#include <random>

#include "alexcmp/error.hpp"
#include "alexcmp/globalize.hpp"
#include "oracles.hpp"

using namespace alexcmp;
using namespace alexcmp::globalize;
using oracle::pi;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an alexcmp::Error");
  return ErrorKind::InvalidArgument;
}

PointRef at(const MetricSpace& s, double a, double b) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g", a, b);
  return s.parse_point(buf);
}

const CurvatureParam kFlat(0);

struct ConeFixture {
  SpacePtr cone = make_cone(3 * pi, 0.01);
  PointRef p = at(*cone, 1, 0.75 * pi);
  PointRef r1 = at(*cone, 1, 0);
  PointRef r2 = at(*cone, 1, 1.5 * pi);
  Triangle tri = comparison::make_triangle(*cone, kFlat, p, r1, r2);
  double h = cone->resolution();
};

// Excess along [r1 r2] from the unrolled cone: r1 -> apex -> r2.
double oracle_excess(double s) {
  const double pr = oracle::cone_distance(3 * pi, 1, 0.75 * pi, 1, 0);
  const double rho = s <= 1 ? 1 - s : s - 1;
  const double phi = s <= 1 ? 0 : 1.5 * pi;
  const double actual = oracle::cone_distance(3 * pi, 1, 0.75 * pi, rho, phi);
  // Model: isosceles with legs pr, base 2; p~ above the base midpoint.
  const double height = std::sqrt(pr * pr - 1);
  return actual - std::hypot(s - 1, height);
}

}  // namespace

TEST_CASE("orient") {
  ConeFixture f;
  const auto t = orient(f.tri, Vertex::R, Vertex::P);
  CHECK(t.p == f.r2);
  CHECK(t.q == f.p);
  CHECK(t.r == f.r1);
  CHECK(t.pq.front() == f.r2);
  CHECK(t.pq.back() == f.p);
  CHECK(t.qr.front() == f.p);
  CHECK(t.qr.back() == f.r1);
  CHECK(t.pr.total == f.tri.qr.total);
  CHECK(kind_of([&] { orient(f.tri, Vertex::P, Vertex::P); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("split on flat and round controls") {
  const auto plane = make_plane();
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto tri = comparison::make_triangle(*plane, kFlat, plane->sample_point(rng), plane->sample_point(rng),
                                               plane->sample_point(rng));
    CHECK(kind_of([&] { split_at_min(*plane, kFlat, tri); }) == ErrorKind::NoNegativeExcess);
  }
  const auto sphere = make_sphere(1.0);
  const CurvatureParam sph(1);
  int tested = 0;
  while (tested < 20) {
    Triangle tri;
    try {
      tri = comparison::make_triangle(*sphere, sph, sphere->sample_point(rng), sphere->sample_point(rng),
                                      sphere->sample_point(rng));
      if (std::max({tri.pq.total, tri.pr.total, tri.qr.total}) >= 0.99 * pi) continue;
    } catch (const Error&) {
      continue;
    }
    ++tested;
    CHECK(kind_of([&] { split_at_min(*sphere, sph, tri); }) == ErrorKind::NoNegativeExcess);
  }
  const auto near_antipodal = comparison::make_triangle(*sphere, sph, sphere->parse_point("0,0"),
                                                        sphere->parse_point("0,179"), sphere->parse_point("10,0"));
  CHECK(kind_of([&] { split_at_min(*sphere, sph, orient(near_antipodal, Vertex::R, Vertex::P)); }) ==
        ErrorKind::OutOfRegime);
}

TEST_CASE("split on the cone") {
  ConeFixture f;
  const auto cert = split_at_min(*f.cone, kFlat, f.tri);
  CHECK(cert.excess < -cert.tolerance);
  CHECK(cert.excess == doctest::Approx(oracle_excess(cert.t)).epsilon(1e-9));
  double grid_min = 0;
  for (int i = 1; i < 20000; ++i) grid_min = std::min(grid_min, oracle_excess(2.0 * i / 20000));
  CHECK(cert.min_sampled_excess == doctest::Approx(grid_min).epsilon(0.05));
  for (const auto& [t, fv] : cert.profile) CHECK(fv == doctest::Approx(oracle_excess(t)).epsilon(1e-9).scale(1e-9));
  CHECK(cert.bound_ok);
  CHECK(cert.mandatory_ok);
  // The minimizer is the apex, where neither sub-angle is bad; the certificate
  // comes from the next-lowest sample.
  CHECK_FALSE(cert.at_minimum);
  CHECK(cert.s0.coords.x <= 2 * f.h);
  CHECK(cert.dist_p_s0 <= cert.bound + cert.slack);

  // Independent re-measurement of every attached certificate.
  bool any = false;
  for (int i = 0; i < 2; ++i) {
    const auto& sub = cert.sub[static_cast<std::size_t>(i)];
    if (!sub.certificate) continue;
    any = true;
    const auto& tri = cert.sub_triangles[static_cast<std::size_t>(i)];
    CHECK(tri.q == cert.s0);
    CHECK(tri.p == f.p);
    const auto again = comparison::badness(*f.cone, kFlat, tri, Vertex::Q, cert.tolerance, 1e-5);
    REQUIRE(again);
    CHECK(again->deficit == doctest::Approx(sub.deficit).epsilon(1e-3));
  }
  CHECK(any);
  CHECK(cert.sub[static_cast<std::size_t>(cert.preferred())].certificate);
}

TEST_CASE("apex minimizer carries no mandatory sub-angle") {
  // At the apex the measured sub-angles cannot both match the model angles
  // (their sum exceeds pi), so the equality behind the mandatory rule fails.
  const auto cone = make_cone(3 * pi, 0.01);
  int found = 0;
  for (int j = 1; j < 40; ++j) {
    const auto tri = comparison::make_triangle(*cone, kFlat, at(*cone, 0.6, 0.3 + 0.07 * j), at(*cone, 1, 0),
                                               at(*cone, 0.8, 1.5 * pi));
    SplitCertificate cert;
    try {
      cert = split_at_min(*cone, kFlat, tri);
    } catch (const Error&) {
      continue;
    }
    if (!cert.at_minimum || cert.s0.coords.x > 1e-6) continue;
    ++found;
    CHECK_FALSE(cert.variation_ok);
    for (const auto& sub : cert.sub) CHECK_FALSE(sub.mandatory);
  }
  CHECK(found > 0);
}

TEST_CASE("localize on the cone reaches the apex") {
  ConeFixture f;
  const auto res = localize(*f.cone, kFlat, f.tri);
  CHECK(res.stop == LocalizeStop::SideBelowDelta);
  CHECK(res.s_bar.coords.x <= 2 * f.h);
  CHECK(f.cone->distance(res.s_bar, res.s1) <= 10 * f.h);
  CHECK(f.cone->distance(res.s_bar, res.s2) <= 10 * f.h);
  CHECK(res.iterations >= 1);
  const double bound0 = std::max(f.tri.pq.total, f.tri.pr.total);
  CHECK(res.dist_p_s_bar <= bound0 + 5 * f.h);
  for (std::size_t i = 1; i < res.bounds.size(); ++i) CHECK(res.bounds[i] <= res.bounds[i - 1] + 5 * f.h);

  LocalizeOptions tight;
  tight.delta = 3 * f.h;
  CHECK(kind_of([&] { localize(*f.cone, kFlat, f.tri, tight); }) == ErrorKind::ResolutionFloor);
  LocalizeOptions short_budget;
  short_budget.delta = 4 * f.h;
  short_budget.max_iterations = 0;
  CHECK(kind_of([&] { localize(*f.cone, kFlat, f.tri, short_budget); }) == ErrorKind::IterationBudgetExceeded);

  const auto plane = make_plane();
  const auto flat_tri = comparison::make_triangle(*plane, kFlat, at(*plane, 0, 1), at(*plane, 0, 0), at(*plane, 1, 0));
  CHECK(kind_of([&] { localize(*plane, kFlat, flat_tri); }) == ErrorKind::NoNegativeExcess);
}

TEST_CASE("estimate_delta") {
  const auto plane = make_plane();
  const auto p = at(*plane, 0, 0), o = at(*plane, 0.4, 0.3);
  const auto est = estimate_delta(*plane, kFlat, p, o);
  CHECK(est.delta == doctest::Approx(0.25));
  CHECK(est.dist_p_o == doctest::Approx(0.5));
  CHECK(kind_of([&] { estimate_delta(*plane, kFlat, p, p); }) == ErrorKind::InvalidArgument);

  ConeFixture f;
  const auto far_p = at(*f.cone, 1, 0);
  for (double d : {0.1, 0.2, 0.3}) {
    const auto o2 = at(*f.cone, d, 1.6 * pi);
    const auto e = estimate_delta(*f.cone, kFlat, far_p, o2);
    CHECK(e.dist_p_o == doctest::Approx(1 + d));
    CHECK(e.delta <= (1 + d) / 2 + 1e-12);
    CHECK(e.delta_o == doctest::Approx(d).epsilon(0.3));
  }
  const auto apex_adjacent = at(*f.cone, f.h, 1.0);
  try {
    const auto e = estimate_delta(*f.cone, kFlat, far_p, apex_adjacent);
    CHECK(e.delta_o <= 6 * f.h);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ResolutionFloor);
  }

  // More samples can only expose more bad triangles.
  const auto o3 = at(*f.cone, 0.15, 0.4);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t budget : {10u, 40u, 160u}) {
    DeltaOptions opts;
    opts.budget = budget;
    const double d = estimate_delta(*f.cone, kFlat, far_p, o3, opts).delta;
    CHECK(d <= previous);
    previous = d;
  }
}

TEST_CASE("descent step") {
  CHECK(step_accepted(1.0, 0.3, 0.9, 0.1, 1e-9));
  CHECK_FALSE(step_accepted(1.0, 0.3, 0.9 + 1e-6, 0.1, 1e-9));
  CHECK_FALSE(step_accepted(1.0, 0.3, 0.5, 0.3, 1e-9));

  const auto plane = make_plane();
  CHECK(kind_of([&] { descent_step(*plane, kFlat, at(*plane, 0, 0), at(*plane, 0.5, 0), 0.25); }) ==
        ErrorKind::WitnessNotFound);

  ConeFixture f;
  const auto p = at(*f.cone, 1, 0);
  const auto o = at(*f.cone, 0.3, 1.5 * pi);
  const auto est = estimate_delta(*f.cone, kFlat, p, o);
  CHECK(est.dist_p_o / 2 > est.delta_o);
  const auto step = descent_step(*f.cone, kFlat, p, o, est.delta);
  CHECK(step.dist_p_o_next <= est.dist_p_o - est.delta / 3 + 1e-6);
  CHECK(step.step < est.delta);
  CHECK(step.witness_deficit > 1e-6);
  CHECK(f.cone->distance(p, step.r1_bar) == doctest::Approx(step.target).epsilon(1e-9));
  // The witness sits in the apex shadow: both witness paths to p pass the apex.
  CHECK(f.cone->distance(p, step.r1) == doctest::Approx(1 + step.r1.coords.x));
}

TEST_CASE("trace invariants") {
  const auto plane = make_plane();
  DescentTrace trace;
  trace.base = at(*plane, 0, 0);
  trace.steps.push_back({at(*plane, 1, 0), 0.3, 1.0, 0.1, false});
  trace.steps.push_back({at(*plane, 0.85, 0), 0.3, 0.85, 0.1, false});
  trace.steps.push_back({at(*plane, 0.75, 0), 0.0, 0.75, 0.1, true});
  CHECK(check_trace(*plane, trace, 1e-9).all());

  auto slow = trace;
  slow.steps[1] = {at(*plane, 0.95, 0), 0.3, 0.95, 0.1, false};
  CHECK_FALSE(check_trace(*plane, slow, 1e-9).step_decrease);

  auto jump = trace;
  jump.steps[1] = {at(*plane, 0.5, 0.5), 0.3, std::hypot(0.5, 0.5), 0.1, false};
  CHECK_FALSE(check_trace(*plane, jump, 1e-9).step_locality);

  DescentTrace greedy;
  greedy.base = trace.base;
  greedy.steps.push_back({at(*plane, 1, 0), 1.8, 1.0, 0.1, false});
  greedy.steps.push_back({at(*plane, 0.4, 0), 1.8, 0.4, 0.1, false});
  greedy.steps.push_back({at(*plane, 0.0, 0.1), 0.0, 0.1, 0.1, true});
  CHECK_FALSE(check_trace(*plane, greedy, 1e-9).delta_sum);
}

TEST_CASE("audit") {
  Rng rng(8);
  for (const auto& [space, k] : {std::pair{make_plane(), 0.0}, std::pair{make_sphere(1.0), 1.0},
                                 std::pair{make_hyperbolic(), -1.0}}) {
    const CurvatureParam kp(k);
    for (int i = 0; i < 5; ++i) {
      const auto p = space->sample_point(rng), q = space->sample_point(rng), r = space->sample_point(rng);
      try {
        const auto res = globalization_audit(*space, kp, p, q, r);
        CHECK(res.verdict == Verdict::Holds);
        CHECK(res.trace.steps.empty());
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OutOfRegime);
      }
    }
  }

  ConeFixture f;
  // Every vertex order of the seed triangle lands on the apex.
  const std::array<PointRef, 3> v = {f.p, f.r1, f.r2};
  for (const auto& [a, b, c] : {std::tuple{0, 1, 2}, std::tuple{1, 0, 2}, std::tuple{2, 1, 0}, std::tuple{1, 2, 0}}) {
    const auto res = globalization_audit(*f.cone, kFlat, v[a], v[b], v[c]);
    CHECK(res.verdict == Verdict::Violated);
    REQUIRE(res.seed_certificate);
    CHECK(res.seed_certificate->deficit >= 0.1);
    REQUIRE_FALSE(res.trace.steps.empty());
    CHECK(res.terminal.coords.x <= 2 * f.h);
    CHECK(res.terminal_defect);
    CHECK(res.terminal_worst_deficit > comparison::default_tolerance(*f.cone));
    CHECK(res.invariants.all());
    // The delta budget forces min delta_i below 2 * 3 |p o_1| / n.
    double sum = 0, least = res.trace.steps.front().delta;
    for (const auto& s : res.trace.steps) {
      sum += s.delta / 3;
      least = std::min(least, s.delta);
    }
    const double first = res.trace.steps.front().dist_p_o;
    CHECK(sum <= first + comparison::default_tolerance(*f.cone));
    CHECK(least < 2 * first * 3 / static_cast<double>(res.trace.steps.size()));
  }
}

TEST_CASE("audit descends from a shadow entry") {
  // Entering at a point of the apex shadow forces real descent steps.
  ConeFixture f;
  const auto p = at(*f.cone, 1, 0);
  DescentTrace trace;
  trace.base = p;
  PointRef o = at(*f.cone, 0.4, 1.6 * pi);
  for (int i = 0; i < 40; ++i) {
    TraceStep ts{o, 0.0, f.cone->distance(p, o), 0.0, false};
    try {
      ts.delta = estimate_delta(*f.cone, kFlat, p, o).delta;
    } catch (const Error& e) {
      REQUIRE(e.kind() == ErrorKind::ResolutionFloor);
      ts.resolution_floor = true;
      trace.steps.push_back(ts);
      break;
    }
    trace.steps.push_back(ts);
    try {
      o = descent_step(*f.cone, kFlat, p, o, ts.delta).o_next;
    } catch (const Error& e) {
      REQUIRE(e.kind() == ErrorKind::WitnessNotFound);
      break;
    }
  }
  CHECK(trace.steps.size() >= 3);
  CHECK(check_trace(*f.cone, trace, comparison::default_tolerance(*f.cone)).all());
  CHECK(trace.steps.back().o.coords.x < 5 * f.h);
}
