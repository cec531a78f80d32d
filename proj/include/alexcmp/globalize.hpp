#pragma once

// Split / localize / descent machinery that turns one bad angle into a
// located curvature defect, or confirms the comparison inequality at the
// working resolution.
//
// Triangles passed to split_at_min and localize are oriented as
// (p = base point, q = r1 = vertex with the bad angle, r = r2); the side being
// split is [r1 r2] = tri.qr.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alexcmp/comparison.hpp"

namespace alexcmp::globalize {

using comparison::BadAngleCertificate;
using comparison::Triangle;
using spaceform::CurvatureParam;
using spaceform::Vertex;

/// Reorders a triangle so that `base` becomes p and `bad` becomes q.
Triangle orient(const Triangle& tri, Vertex base, Vertex bad);

/// Max side / (pi/sqrt(k)) above which k > 0 configurations are refused.
inline constexpr double kRegimeFraction = 0.99;

/// Slack on |p s0| <= max |p r_i|: for k > 0 with max |p r_i| >= pi/(2 sqrt k)
/// it is max(5h, 0.01 |r1 r2|); otherwise 2 eta + tol.
double distance_bound_slack(const MetricSpace& space, const CurvatureParam& k, double max_pr,
                            double side, double tol);

struct SplitOptions {
  /// Uniform interior samples along [r1 r2] for analytic backends; discrete
  /// backends evaluate every interior vertex.
  std::size_t samples = 64;
  /// Negative selects comparison::default_tolerance.
  double tol = -1.0;
  /// How many of the lowest-excess points are tried when the minimizer does
  /// not certify a bad sub-angle.
  std::size_t candidates = 8;
};

struct SubAngle {
  std::optional<BadAngleCertificate> certificate;
  double deficit = 0.0;
  /// s0 is the sampled minimizer, |r_i s0| <= |r_i p| and variation_ok holds,
  /// so this sub-angle must be bad.
  bool mandatory = false;
};

struct SplitCertificate {
  PointRef s0;
  double t = 0.0;        // arclength of s0 along [r1 r2]
  double excess = 0.0;   // |p s0| - |p~ s0~|
  double min_sampled_excess = 0.0;
  /// False when the minimizer certified nothing and a fallback point was used.
  bool at_minimum = true;
  /// Both measured sub-angles at s0 equal the model angles at s0~ of the
  /// comparison triangle within tol. Fails where the space is not locally
  /// curved >= k (a cone apex of angle > 2 pi), and then no sub-angle is
  /// mandatory.
  bool variation_ok = true;
  std::array<SubAngle, 2> sub;  // [0]: angle p s0 r1, [1]: angle p s0 r2
  std::array<Triangle, 2> sub_triangles;  // (p, s0, r_i) oriented for splitting
  double dist_p_s0 = 0.0;
  double bound = 0.0;  // max(|p r1|, |p r2|)
  double slack = 0.0;
  bool bound_ok = false;
  bool mandatory_ok = false;
  double tolerance = 0.0;
  std::vector<std::pair<double, double>> profile;  // sampled (t, excess)

  /// Index of the certified sub-angle with the larger deficit.
  int preferred() const;
};

/// Sampled (t, |p s_t| - |p~ s~_t|) along [r1 r2], with the same sample
/// placement as split_at_min.
std::vector<std::pair<double, double>> excess_profile(const MetricSpace& space,
                                                      const CurvatureParam& k, const Triangle& tri,
                                                      std::size_t samples = 64);

/// Throws Error(NoNegativeExcess) when the excess never drops below -tol,
/// Error(NoCertifiedSubAngle) when no low-excess point certifies a bad
/// sub-angle, and Error(OutOfRegime) for k > 0 sides >= 0.99 pi/sqrt(k).
SplitCertificate split_at_min(const MetricSpace& space, const CurvatureParam& k,
                              const Triangle& tri, const SplitOptions& options = {});

enum class LocalizeStop : std::uint8_t { SideBelowDelta, ExcessUnresolved, NoCertifiedSubAngle };

std::string_view to_string(LocalizeStop stop);

struct LocalizeOptions {
  double delta = 0.0;  // target scale; <= 0 selects 10h
  std::size_t max_iterations = 64;
  SplitOptions split;
};

struct LocalizeResult {
  PointRef s_bar;
  PointRef s1, s2;        // the last bad pair: angle p s1 s2 is bad
  double dist_p_s_bar = 0.0;
  double bad_deficit = 0.0;
  std::vector<double> bounds;  // running max(|p r1|, |p r2|) per active triangle
  std::vector<double> slacks;
  std::vector<PointRef> split_points;
  std::size_t iterations = 0;
  LocalizeStop stop = LocalizeStop::SideBelowDelta;
};

/// Repeated splitting towards the certified bad sub-angle until the active
/// side is shorter than delta. Throws Error(ResolutionFloor) for delta < 4h,
/// Error(IterationBudgetExceeded), and the first split's errors.
LocalizeResult localize(const MetricSpace& space, const CurvatureParam& k, const Triangle& tri,
                        const LocalizeOptions& options = {});

struct DeltaOptions {
  std::size_t budget = 200;
  double tol = -1.0;
  std::uint64_t seed = 1;
  std::size_t bisection_steps = 16;
};

struct DeltaEstimate {
  double delta = 0.0;    // min(|po|/2, delta_o)
  double delta_o = 0.0;  // largest radius found good (capped at max(|po|/2, 4h))
  double dist_p_o = 0.0;
};

/// Throws Error(ResolutionFloor) when B(o, 4h) already holds a bad triangle.
DeltaEstimate estimate_delta(const MetricSpace& space, const CurvatureParam& k, const PointRef& p,
                             const PointRef& o, const DeltaOptions& options = {});

struct DescentOptions {
  double witness_ratio = 0.1;  // witness search radius / delta(o), at least 2h
  std::size_t witness_budget = 200;
  std::size_t max_witnesses = 8;
  double tol = -1.0;
  std::uint64_t seed = 1;
  LocalizeOptions localize;
};

struct DescentStep {
  PointRef o_next;
  double dist_p_o = 0.0;
  double dist_p_o_next = 0.0;
  double target = 0.0;  // |po| - delta/3
  double delta = 0.0;
  double step = 0.0;    // |o o_next|
  double witness_deficit = 0.0;
  PointRef r1, r2, r1_bar, r2_bar;
  std::optional<spaceform::AlexandrovComparison> gluing;
};

/// One step of the descent: from a bad witness near o, produce o' with
/// |p o'| <= |po| - delta/3 + tol and |o o'| < delta. Throws
/// Error(WitnessNotFound) when no witness survives the construction.
DescentStep descent_step(const MetricSpace& space, const CurvatureParam& k, const PointRef& p,
                         const PointRef& o, double delta, const DescentOptions& options = {});

/// Pure acceptance test for a descent step.
bool step_accepted(double dist_p_o, double delta, double dist_p_o_next, double step, double tol);

struct TraceStep {
  PointRef o;
  double delta = 0.0;  // 0 when B(o, 4h) is already bad
  double dist_p_o = 0.0;
  double witness_deficit = 0.0;
  bool resolution_floor = false;
};

struct DescentTrace {
  PointRef base;
  std::vector<TraceStep> steps;
};

struct TraceInvariants {
  bool step_decrease = true;
  bool step_locality = true;
  bool delta_sum = true;
  bool all() const { return step_decrease && step_locality && delta_sum; }
};

TraceInvariants check_trace(const MetricSpace& space, const DescentTrace& trace, double tol);

enum class Verdict : std::uint8_t { Holds, Violated };

std::string_view to_string(Verdict v);

struct AuditOptions {
  std::size_t budget = 200;
  std::uint64_t seed = 1;
  double tol = -1.0;
  std::size_t max_steps = 32;
  LocalizeOptions localize;
  double witness_ratio = 0.1;
};

struct AuditResult {
  Verdict verdict = Verdict::Holds;
  std::optional<BadAngleCertificate> seed_certificate;
  std::optional<LocalizeResult> entry;
  DescentTrace trace;
  TraceInvariants invariants;
  PointRef terminal;
  double terminal_worst_deficit = 0.0;
  bool terminal_defect = false;
  std::string termination;
};

/// Throws Error(BudgetExceeded) when max_steps descent steps do not terminate.
AuditResult globalization_audit(const MetricSpace& space, const CurvatureParam& k,
                                const PointRef& p, const PointRef& q, const PointRef& r,
                                const AuditOptions& options = {});

}  // namespace alexcmp::globalize
