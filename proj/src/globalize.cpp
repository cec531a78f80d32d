#include "alexcmp/globalize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "alexcmp/error.hpp"

namespace alexcmp::globalize {

namespace {

using comparison::default_tolerance;
using comparison::make_triangle;

constexpr double kInvPhi = 0.6180339887498949;

GeodesicPolyline edge(const Triangle& tri, Vertex from, Vertex to) {
  auto key = [](Vertex a, Vertex b) { return static_cast<int>(a) * 3 + static_cast<int>(b); };
  switch (key(from, to)) {
    case 1: return tri.pq;              // P->Q
    case 2: return tri.pr;              // P->R
    case 3: return reversed(tri.pq);    // Q->P
    case 5: return tri.qr;              // Q->R
    case 6: return reversed(tri.pr);    // R->P
    case 7: return reversed(tri.qr);    // R->Q
    default: break;
  }
  throw Error(ErrorKind::InvalidArgument, "edge needs two distinct vertices");
}

double resolve_tol(const MetricSpace& space, double tol) {
  return tol >= 0.0 ? tol : default_tolerance(space);
}

void check_regime(const CurvatureParam& k, const Triangle& tri) {
  if (!k.spherical()) return;
  const double longest = std::max({tri.pq.total, tri.pr.total, tri.qr.total});
  if (longest >= kRegimeFraction * k.diameter()) {
    throw Error(ErrorKind::OutOfRegime, "side too close to pi/sqrt(k)");
  }
}

struct ExcessSample {
  double t;
  double f;
  PointRef s;
};

}  // namespace

Triangle orient(const Triangle& tri, Vertex base, Vertex bad) {
  if (base == bad) throw Error(ErrorKind::InvalidArgument, "base and bad vertex must differ");
  const auto other = static_cast<Vertex>(3 - static_cast<int>(base) - static_cast<int>(bad));
  return Triangle{tri.vertex(base), tri.vertex(bad), tri.vertex(other),
                  edge(tri, base, bad), edge(tri, base, other), edge(tri, bad, other)};
}

double distance_bound_slack(const MetricSpace& space, const CurvatureParam& k, double max_pr,
                            double side, double tol) {
  if (k.spherical() && max_pr >= 0.5 * k.diameter()) {
    return std::max(5.0 * space.resolution(), 0.01 * side);
  }
  return 2.0 * space.distance_error() + tol;
}

int SplitCertificate::preferred() const {
  const bool b0 = sub[0].certificate.has_value();
  const bool b1 = sub[1].certificate.has_value();
  if (b0 && b1) return sub[1].deficit > sub[0].deficit ? 1 : 0;
  return b1 ? 1 : 0;
}

namespace {

struct Excess {
  const MetricSpace& space;
  const Triangle& tri;
  spaceform::ComparisonTriangle model;

  ExcessSample at(double t) const {
    const Located s = space.locate(tri.qr, t);
    const double f = space.distance(tri.p, s.point) -
                     spaceform::distance_to_side_point(model, Vertex::P, s.arclength);
    return {s.arclength, f, s.point};
  }

  std::vector<ExcessSample> sampled(std::size_t m) const {
    std::vector<ExcessSample> out;
    const GeodesicPolyline& side = tri.qr;
    if (space.analytic()) {
      m = std::max<std::size_t>(m, 16);
      for (std::size_t i = 1; i <= m; ++i) {
        out.push_back(at(side.total * static_cast<double>(i) / static_cast<double>(m + 1)));
      }
    } else {
      for (std::size_t i = 1; i + 1 < side.points.size(); ++i) out.push_back(at(side.cum[i]));
    }
    return out;
  }
};

}  // namespace

std::vector<std::pair<double, double>> excess_profile(const MetricSpace& space,
                                                      const CurvatureParam& k, const Triangle& tri,
                                                      std::size_t samples) {
  const Excess excess{space, tri, spaceform::build_comparison_triangle(k, tri.sides())};
  std::vector<std::pair<double, double>> out;
  for (const auto& s : excess.sampled(samples)) out.emplace_back(s.t, s.f);
  return out;
}

SplitCertificate split_at_min(const MetricSpace& space, const CurvatureParam& k,
                              const Triangle& tri, const SplitOptions& options) {
  check_regime(k, tri);
  const double tol = resolve_tol(space, options.tol);
  const GeodesicPolyline& side = tri.qr;
  const double L = side.total;
  const Excess excess{space, tri, spaceform::build_comparison_triangle(k, tri.sides())};
  auto excess_at = [&](double t) { return excess.at(t); };

  const std::vector<ExcessSample> samples = excess.sampled(options.samples);
  if (samples.empty()) throw Error(ErrorKind::NoNegativeExcess, "side has no interior points");

  SplitCertificate cert;
  cert.tolerance = tol;
  for (const auto& s : samples) cert.profile.emplace_back(s.t, s.f);
  const auto best = static_cast<std::size_t>(
      std::min_element(samples.begin(), samples.end(),
                       [](const auto& a, const auto& b) { return a.f < b.f; }) -
      samples.begin());
  cert.min_sampled_excess = samples[best].f;

  std::vector<ExcessSample> candidates = samples;
  if (space.analytic()) {
    // Golden-section pass inside the neighbouring sample interval.
    const double spacing = L / static_cast<double>(samples.size() + 1);
    double lo = std::max(0.0, samples[best].t - spacing);
    double hi = std::min(L, samples[best].t + spacing);
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    ExcessSample f1 = excess_at(x1), f2 = excess_at(x2);
    for (int it = 0; it < 80 && hi - lo > 1e-10 * std::max(1.0, L); ++it) {
      if (f1.f < f2.f) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - kInvPhi * (hi - lo);
        f1 = excess_at(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + kInvPhi * (hi - lo);
        f2 = excess_at(x2);
      }
    }
    const ExcessSample refined = f1.f < f2.f ? f1 : f2;
    if (refined.f < samples[best].f && refined.t > 0.0 && refined.t < L) candidates.push_back(refined);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& a, const auto& b) { return a.f < b.f; });
  if (!(candidates.front().f < -tol)) {
    throw Error(ErrorKind::NoNegativeExcess, "excess does not drop below -tol on the side");
  }

  const double pr1 = tri.pq.total;
  const double pr2 = tri.pr.total;
  cert.bound = std::max(pr1, pr2);
  cert.slack = distance_bound_slack(space, k, cert.bound, L, tol);

  const std::size_t tries = std::max<std::size_t>(options.candidates, 1);
  for (std::size_t c = 0; c < candidates.size() && c < tries; ++c) {
    const ExcessSample& s = candidates[c];
    if (!(s.f < -tol)) break;
    if (space.same_point(s.s, tri.q) || space.same_point(s.s, tri.r)) continue;
    const GeodesicPolyline ps = space.geodesic(tri.p, s.s);
    const std::array<Triangle, 2> subs = {
        Triangle{tri.p, s.s, tri.q, ps, tri.pq, space.subpath(side, s.t, 0.0)},
        Triangle{tri.p, s.s, tri.r, ps, tri.pr, space.subpath(side, s.t, L)}};
    std::array<SubAngle, 2> sub{};
    bool any = false;
    bool variation_ok = true;
    const double model_ps = ps.total - s.f;
    for (int i = 0; i < 2; ++i) {
      const double pri = i == 0 ? pr1 : pr2;
      const auto va = comparison::vertex_angles(space, k, subs[i], Vertex::Q);
      const double model = spaceform::comparison_angle(
          k, spaceform::SideTriple::from_lengths(model_ps, pri, subs[i].qr.total), Vertex::Q);
      if (std::abs(va.measured.value - model) > tol) variation_ok = false;
      sub[i].deficit = va.deficit();
      sub[i].mandatory = c == 0 && subs[i].qr.total <= pri;
      if (sub[i].deficit > tol) {
        sub[i].certificate =
            BadAngleCertificate{subs[i], Vertex::Q, va.measured, va.comparison, sub[i].deficit, tol};
        any = true;
      }
    }
    if (!variation_ok) {
      for (auto& sa : sub) sa.mandatory = false;
    }
    if (!any) continue;
    cert.s0 = s.s;
    cert.t = s.t;
    cert.excess = s.f;
    cert.at_minimum = c == 0;
    cert.variation_ok = variation_ok;
    cert.sub = std::move(sub);
    cert.sub_triangles = subs;
    cert.dist_p_s0 = ps.total;
    cert.bound_ok = cert.dist_p_s0 <= cert.bound + cert.slack;
    cert.mandatory_ok = true;
    for (const auto& sa : cert.sub) {
      if (sa.mandatory && !sa.certificate) cert.mandatory_ok = false;
    }
    return cert;
  }
  throw Error(ErrorKind::NoCertifiedSubAngle,
              "no low-excess point on the side certifies a bad sub-angle");
}

std::string_view to_string(LocalizeStop stop) {
  switch (stop) {
    case LocalizeStop::SideBelowDelta: return "side-below-delta";
    case LocalizeStop::ExcessUnresolved: return "excess-unresolved";
    case LocalizeStop::NoCertifiedSubAngle: return "no-certified-sub-angle";
  }
  return "?";
}

LocalizeResult localize(const MetricSpace& space, const CurvatureParam& k, const Triangle& tri,
                        const LocalizeOptions& options) {
  const double h = space.resolution();
  const double delta = options.delta > 0.0 ? options.delta : 10.0 * h;
  if (delta < 4.0 * h) throw Error(ErrorKind::ResolutionFloor, "target scale below 4h");
  const double tol = resolve_tol(space, options.split.tol);

  LocalizeResult out;
  Triangle active = tri;
  out.s_bar = active.q;
  out.s1 = active.q;
  out.s2 = active.r;
  out.bounds.push_back(std::max(active.pq.total, active.pr.total));
  out.slacks.push_back(distance_bound_slack(space, k, out.bounds.back(), active.qr.total, tol));
  out.bad_deficit = comparison::vertex_angles(space, k, active, Vertex::Q).deficit();

  for (;;) {
    if (active.qr.total < delta) {
      out.stop = LocalizeStop::SideBelowDelta;
      break;
    }
    if (out.iterations >= options.max_iterations) {
      throw Error(ErrorKind::IterationBudgetExceeded, "localization did not reach the target scale");
    }
    SplitCertificate split;
    try {
      split = split_at_min(space, k, active, options.split);
    } catch (const Error& e) {
      if (out.iterations == 0) throw;
      if (e.kind() == ErrorKind::NoNegativeExcess) {
        out.stop = LocalizeStop::ExcessUnresolved;
        break;
      }
      if (e.kind() == ErrorKind::NoCertifiedSubAngle) {
        out.stop = LocalizeStop::NoCertifiedSubAngle;
        break;
      }
      throw;
    }
    ++out.iterations;
    const int i = split.preferred();
    active = split.sub_triangles[static_cast<std::size_t>(i)];
    out.s_bar = split.s0;
    out.s1 = active.q;
    out.s2 = active.r;
    out.bad_deficit = split.sub[static_cast<std::size_t>(i)].deficit;
    out.split_points.push_back(split.s0);
    out.bounds.push_back(std::max(active.pq.total, active.pr.total));
    out.slacks.push_back(split.slack);
  }
  out.dist_p_s_bar = space.distance(tri.p, out.s_bar);
  return out;
}

DeltaEstimate estimate_delta(const MetricSpace& space, const CurvatureParam& k, const PointRef& p,
                             const PointRef& o, const DeltaOptions& options) {
  if (space.same_point(p, o)) throw Error(ErrorKind::InvalidArgument, "o must differ from p");
  const double h = space.resolution();
  const double tol = resolve_tol(space, options.tol);
  DeltaEstimate est;
  est.dist_p_o = space.distance(p, o);

  auto good = [&](double radius) {
    try {
      return comparison::local_check(space, k, o, radius, options.budget, tol, options.seed).good;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::EmptyBall) return true;
      throw;
    }
  };

  const double floor = 4.0 * h;
  const double cap = std::max(0.5 * est.dist_p_o, floor);
  if (good(cap)) {
    est.delta_o = cap;
  } else {
    if (!good(floor)) throw Error(ErrorKind::ResolutionFloor, "B(o, 4h) already holds a bad triangle");
    double lo = floor, hi = cap;
    for (std::size_t i = 0; i < options.bisection_steps && hi - lo > h; ++i) {
      const double mid = 0.5 * (lo + hi);
      (good(mid) ? lo : hi) = mid;
    }
    est.delta_o = lo;
  }
  est.delta = std::min(0.5 * est.dist_p_o, est.delta_o);
  return est;
}

bool step_accepted(double dist_p_o, double delta, double dist_p_o_next, double step, double tol) {
  return dist_p_o_next <= dist_p_o - delta / 3.0 + tol && step < delta;
}

DescentStep descent_step(const MetricSpace& space, const CurvatureParam& k, const PointRef& p,
                         const PointRef& o, double delta, const DescentOptions& options) {
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be positive");
  const double h = space.resolution();
  const double tol = resolve_tol(space, options.tol);
  const double po = space.distance(p, o);
  const double target = po - delta / 3.0;
  if (!(target > 0.0)) throw Error(ErrorKind::WitnessNotFound, "delta(o)/3 exceeds |po|");

  // Witnesses: bad angles p r1 r2 with r1, r2 in B(o, ratio * delta).
  struct Witness {
    PointRef r1, r2;
    double deficit;
  };
  std::vector<Witness> witnesses;
  const double radius = std::max(options.witness_ratio * delta, 2.0 * h);
  Rng rng(options.seed);
  const auto pts = space.sample_ball(o, radius, 2 * options.witness_budget, rng);
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    const PointRef& a = pts[i];
    const PointRef& b = pts[i + 1];
    if (space.same_point(a, p) || space.same_point(b, p) || space.distance(a, b) < 2.0 * h) continue;
    Triangle tri;
    try {
      tri = make_triangle(space, k, p, a, b);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::OutOfRegime) continue;
      throw;
    }
    if (auto c = comparison::badness(space, k, tri, Vertex::Q, tol)) witnesses.push_back({a, b, c->deficit});
    if (auto c = comparison::badness(space, k, tri, Vertex::R, tol)) witnesses.push_back({b, a, c->deficit});
  }
  if (witnesses.empty()) throw Error(ErrorKind::WitnessNotFound, "no bad angle near o");
  std::stable_sort(witnesses.begin(), witnesses.end(),
                   [](const Witness& a, const Witness& b) { return a.deficit > b.deficit; });

  const std::size_t tries = std::min(witnesses.size(), std::max<std::size_t>(options.max_witnesses, 1));
  for (std::size_t w = 0; w < tries; ++w) {
    const Witness& wit = witnesses[w];
    try {
      DescentStep step;
      step.dist_p_o = po;
      step.delta = delta;
      step.target = target;
      step.witness_deficit = wit.deficit;
      step.r1 = wit.r1;
      step.r2 = wit.r2;

      const GeodesicPolyline p_r1 = space.geodesic(p, wit.r1);
      if (p_r1.total < target) continue;
      step.r1_bar = space.point_at(p_r1, target);
      if (space.same_point(step.r1_bar, wit.r2)) continue;

      // Gluing diagnostic for (r2, r1_bar, p) and (r2, r1_bar, r1) along [r2 r1_bar].
      try {
        step.gluing = spaceform::alexandrov_compare(
            k, space.distance(step.r1_bar, wit.r2), space.distance(step.r1_bar, p),
            space.distance(step.r1_bar, wit.r1), space.distance(wit.r2, p),
            space.distance(wit.r2, wit.r1));
      } catch (const Error&) {
        step.gluing.reset();
      }

      const Triangle t1 = make_triangle(space, k, p, step.r1_bar, wit.r2);
      if (!comparison::badness(space, k, t1, Vertex::Q, tol)) continue;
      const SplitCertificate split = split_at_min(space, k, t1, options.localize.split);
      if (!split.sub[0].certificate) continue;

      Triangle t2;
      if (split.dist_p_s0 <= target) {
        step.r2_bar = split.s0;
        t2 = split.sub_triangles[0];
      } else {
        step.r2_bar = space.point_at(space.geodesic(p, split.s0), target);
        if (space.same_point(step.r2_bar, step.r1_bar)) continue;
        t2 = make_triangle(space, k, p, step.r2_bar, step.r1_bar);
        if (!comparison::badness(space, k, t2, Vertex::Q, tol)) continue;
      }

      LocalizeOptions lo = options.localize;
      lo.delta = std::max(4.0 * h, lo.delta > 0.0 ? lo.delta : 0.1 * delta);
      step.o_next = t2.qr.total < lo.delta ? t2.q : localize(space, k, t2, lo).s_bar;
      step.dist_p_o_next = space.distance(p, step.o_next);
      step.step = space.distance(o, step.o_next);
      if (step_accepted(po, delta, step.dist_p_o_next, step.step, tol)) return step;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::UnknownPoint || e.kind() == ErrorKind::InvalidArgument) throw;
    }
  }
  throw Error(ErrorKind::WitnessNotFound, "no witness near o survives the descent construction");
}

TraceInvariants check_trace(const MetricSpace& space, const DescentTrace& trace, double tol) {
  TraceInvariants inv;
  double budget = 0.0;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const TraceStep& s = trace.steps[i];
    budget += s.delta / 3.0;
    if (i + 1 < trace.steps.size()) {
      const TraceStep& n = trace.steps[i + 1];
      if (!(n.dist_p_o <= s.dist_p_o - s.delta / 3.0 + tol)) inv.step_decrease = false;
      if (!(space.distance(s.o, n.o) < s.delta)) inv.step_locality = false;
    }
  }
  if (!trace.steps.empty() && !(budget <= trace.steps.front().dist_p_o + tol)) inv.delta_sum = false;
  return inv;
}

std::string_view to_string(Verdict v) { return v == Verdict::Holds ? "HOLDS" : "VIOLATED"; }

AuditResult globalization_audit(const MetricSpace& space, const CurvatureParam& k,
                                const PointRef& p, const PointRef& q, const PointRef& r,
                                const AuditOptions& options) {
  const double h = space.resolution();
  const double tol = resolve_tol(space, options.tol);
  AuditResult out;
  const Triangle seed = make_triangle(space, k, p, q, r);
  out.seed_certificate = comparison::worst_badness(space, k, seed, tol);
  if (!out.seed_certificate) {
    out.verdict = Verdict::Holds;
    out.termination = "no bad angle at resolution";
    return out;
  }
  out.verdict = Verdict::Violated;
  const Vertex bad = out.seed_certificate->vertex;

  LocalizeOptions lopts = options.localize;
  lopts.split.tol = tol;
  // Enter the defect set from either remaining vertex; keep the entry whose
  // 4h-ball holds the worst bad triangle.
  double entry_score = -1.0;
  for (int b = 0; b < 3; ++b) {
    const auto base = static_cast<Vertex>(b);
    if (base == bad) continue;
    try {
      const Triangle oriented = orient(seed, base, bad);
      LocalizeResult res = localize(space, k, oriented, lopts);
      double score = 0.0;
      try {
        const auto report = comparison::local_check(space, k, res.s_bar, 4.0 * h, options.budget,
                                                    tol, options.seed);
        if (report.worst) score = report.worst->deficit;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::EmptyBall) throw;
      }
      if (score > entry_score) {
        entry_score = score;
        out.entry = std::move(res);
        out.trace.base = oriented.p;
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::BudgetExceeded) throw;
    }
  }
  if (!out.entry) {
    // The bad angle cannot be split at this resolution; its vertex is the
    // located region.
    out.trace.base = bad == Vertex::P ? seed.q : seed.p;
    out.trace.steps.push_back({seed.vertex(bad), 0.0, space.distance(out.trace.base, seed.vertex(bad)),
                               out.seed_certificate->deficit, true});
    out.termination = "bad angle not splittable at resolution";
  } else {
    const PointRef base = out.trace.base;
    PointRef o = out.entry->s_bar;
    double witness = out.entry->bad_deficit;
    for (std::size_t step = 0;; ++step) {
      if (step >= options.max_steps) throw Error(ErrorKind::BudgetExceeded, "descent step budget exhausted");
      TraceStep ts{o, 0.0, space.distance(base, o), witness, false};
      if (space.same_point(o, base)) {
        out.trace.steps.push_back(ts);
        out.termination = "reached the base point";
        break;
      }
      try {
        const DeltaEstimate est = estimate_delta(space, k, base, o,
                                                 {options.budget, tol, options.seed + step, 16});
        ts.delta = est.delta;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ResolutionFloor) throw;
        ts.resolution_floor = true;
        out.trace.steps.push_back(ts);
        out.termination = "defect at resolution scale";
        break;
      }
      out.trace.steps.push_back(ts);
      DescentOptions dopts;
      dopts.witness_ratio = options.witness_ratio;
      dopts.witness_budget = options.budget;
      dopts.tol = tol;
      dopts.seed = options.seed + step;
      dopts.localize = lopts;
      try {
        const DescentStep next = descent_step(space, k, base, o, ts.delta, dopts);
        o = next.o_next;
        witness = next.witness_deficit;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::WitnessNotFound) throw;
        out.termination = "no witness left near the terminal point";
        break;
      }
    }
  }

  out.terminal = out.trace.steps.back().o;
  try {
    const auto report = comparison::local_check(space, k, out.terminal, 4.0 * h,
                                                2 * options.budget, tol, options.seed);
    out.terminal_worst_deficit = report.worst ? report.worst->deficit : 0.0;
    out.terminal_defect = !report.good;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EmptyBall) throw;
  }
  out.invariants = check_trace(space, out.trace, tol);
  return out;
}

}  // namespace alexcmp::globalize
