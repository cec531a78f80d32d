#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "alexcmp/comparison.hpp"
#include "alexcmp/error.hpp"
#include "alexcmp/globalize.hpp"
#include "alexcmp/metricspace.hpp"

namespace alexcmp::cli {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

struct RunConfig {
  std::string space;
  double k = 0.0;
  double tol = -1.0;
  std::uint64_t seed = 1;
  std::size_t budget = 200;
  std::string out;
  std::string trace;
};

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--space", cfg.space, "space spec, e.g. plane, sphere:R=1,mesh=4, cone:angle=3pi")
      ->required();
  cmd->add_option("--k", cfg.k, "comparison curvature");
  cmd->add_option("--tol", cfg.tol, "badness tolerance (default: 5h discrete, 1e-6 analytic)");
  cmd->add_option("--seed", cfg.seed, "random seed");
  cmd->add_option("--budget", cfg.budget, "sampling budget");
  cmd->add_option("--out", cfg.out, "output path for the JSON report");
}

void write_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
    f << text;
    if (!f.flush()) throw Error(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorKind::InvalidArgument, "cannot rename to " + path.string());
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json certificate_json(const MetricSpace& space, const comparison::BadAngleCertificate& c) {
  ordered_json seq = ordered_json::array();
  for (const auto& [t, v] : c.measured.sequence) seq.push_back({t, v});
  return {{"vertex", std::string(spaceform::to_string(c.vertex))},
          {"triangle",
           {space.format_point(c.triangle.p), space.format_point(c.triangle.q),
            space.format_point(c.triangle.r)}},
          {"measured", c.measured.value},
          {"comparison", c.comparison},
          {"deficit", c.deficit},
          {"tolerance", c.tolerance},
          {"probe", c.measured.scale},
          {"sequence", seq}};
}

void emit(const ordered_json& doc, const RunConfig& cfg, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (!cfg.out.empty()) write_atomic(cfg.out, text);
  out << text;
}

int cmd_angle(const RunConfig& cfg, const std::vector<std::string>& ids, double t,
              std::ostream& out) {
  const SpacePtr space = make_space(cfg.space);
  const spaceform::CurvatureParam k(cfg.k);
  const PointRef p = space->parse_point(ids[0]);
  const PointRef q = space->parse_point(ids[1]);
  const PointRef r = space->parse_point(ids[2]);
  const auto tri = comparison::make_triangle(*space, k, p, q, r);
  const double tol = cfg.tol >= 0.0 ? cfg.tol : comparison::default_tolerance(*space);
  const auto va = comparison::vertex_angles(*space, k, tri, spaceform::Vertex::Q, t);
  const auto cert = comparison::badness(*space, k, tri, spaceform::Vertex::Q, tol, t);

  ordered_json doc = {{"command", "angle"},
                      {"space", cfg.space},
                      {"k", cfg.k},
                      {"points", ids},
                      {"measured", va.measured.value},
                      {"comparison", va.comparison},
                      {"deficit", va.deficit()},
                      {"probe", va.measured.scale},
                      {"tolerance", tol},
                      {"bad", cert.has_value()},
                      {"certificate", nullptr}};
  if (cert) doc["certificate"] = certificate_json(*space, *cert);
  emit(doc, cfg, out);
  return cert ? 3 : 0;
}

int cmd_check(const RunConfig& cfg, const std::string& center, double radius, std::ostream& out) {
  const SpacePtr space = make_space(cfg.space);
  const spaceform::CurvatureParam k(cfg.k);
  const PointRef o = space->parse_point(center);
  const double tol = cfg.tol >= 0.0 ? cfg.tol : comparison::default_tolerance(*space);
  const auto report = comparison::local_check(*space, k, o, radius, cfg.budget, tol, cfg.seed);

  ordered_json doc = {{"command", "check"},
                      {"space", cfg.space},
                      {"k", cfg.k},
                      {"center", center},
                      {"radius", radius},
                      {"good", report.good},
                      {"triangles", report.triangles},
                      {"bad_triangles", report.bad_triangles},
                      {"worst", nullptr}};
  if (report.worst) doc["worst"] = certificate_json(*space, *report.worst);
  emit(doc, cfg, out);
  return report.good ? 0 : 3;
}

fs::path trace_path(const RunConfig& cfg) {
  if (!cfg.trace.empty()) return cfg.trace;
  if (cfg.out.empty()) return {};
  fs::path p = cfg.out;
  p.replace_extension(".csv");
  if (p == fs::path(cfg.out)) p += ".trace.csv";
  return p;
}

int cmd_audit(const RunConfig& cfg, const std::vector<std::string>& ids, std::ostream& out) {
  const SpacePtr space = make_space(cfg.space);
  const spaceform::CurvatureParam k(cfg.k);
  const PointRef p = space->parse_point(ids[0]);
  const PointRef q = space->parse_point(ids[1]);
  const PointRef r = space->parse_point(ids[2]);
  globalize::AuditOptions opts;
  opts.budget = cfg.budget;
  opts.seed = cfg.seed;
  opts.tol = cfg.tol;
  const auto res = globalize::globalization_audit(*space, k, p, q, r, opts);

  ordered_json terminal = nullptr;
  if (res.verdict == globalize::Verdict::Violated) {
    terminal = {{"point", space->format_point(res.terminal)},
                {"worst_deficit", res.terminal_worst_deficit}};
  }
  ordered_json doc = {{"verdict", std::string(globalize::to_string(res.verdict))},
                      {"k", cfg.k},
                      {"trace_len", res.trace.steps.size()},
                      {"terminal", terminal},
                      {"invariants",
                       {{"step_decrease", res.invariants.step_decrease},
                        {"step_locality", res.invariants.step_locality},
                        {"delta_sum", res.invariants.delta_sum}}}};

  if (const fs::path csv = trace_path(cfg); !csv.empty()) {
    std::string text = "i,o_id,delta_i,dist_p_oi,witness_deficit\n";
    for (std::size_t i = 0; i < res.trace.steps.size(); ++i) {
      const auto& s = res.trace.steps[i];
      text += std::to_string(i) + "," + csv_field(space->format_point(s.o)) + "," + fmt(s.delta) +
              "," + fmt(s.dist_p_o) + "," + fmt(s.witness_deficit) + "\n";
    }
    write_atomic(csv, text);
  }
  emit(doc, cfg, out);
  return res.verdict == globalize::Verdict::Holds ? 0 : 3;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Comparison-geometry checks on sampled metric spaces", "alexcmp"};
  app.require_subcommand(1);

  RunConfig angle_cfg, audit_cfg, check_cfg;
  std::vector<std::string> angle_points, audit_points;
  double probe = 0.0;
  std::string center;
  double radius = 0.0;

  auto* angle = app.add_subcommand("angle", "measured vs comparison angle at q of (p, q, r)");
  add_common(angle, angle_cfg);
  angle->add_option("--points", angle_points, "p q r")->required()->expected(3);
  angle->add_option("--t", probe, "probe scale (default: 10h discrete, 1e-4 x side analytic)");

  auto* audit = app.add_subcommand("audit", "globalization audit from a seed triangle");
  add_common(audit, audit_cfg);
  audit->add_option("--points", audit_points, "p q r")->required()->expected(3);
  audit->add_option("--trace", audit_cfg.trace, "trace CSV path (default: --out with .csv)");

  auto* check = app.add_subcommand("check", "sample triangles in a ball and report bad angles");
  add_common(check, check_cfg);
  check->add_option("--center", center, "ball center")->required();
  check->add_option("--radius", radius, "ball radius")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (angle->parsed()) return cmd_angle(angle_cfg, angle_points, probe, out);
    if (audit->parsed()) return cmd_audit(audit_cfg, audit_points, out);
    return cmd_check(check_cfg, center, radius, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace alexcmp::cli
