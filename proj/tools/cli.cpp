#include "cli.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "otsphere/axisym_map.hpp"
#include "otsphere/cli_io.hpp"
#include "otsphere/ma_solver.hpp"
#include "otsphere/planar_radial.hpp"
#include "otsphere/quality.hpp"

namespace otsphere {

namespace {

struct SolverOpts {
  int grid = 256;
  double tol = 1e-3;
  int max_iter = 1500;
  double step = 0.5;
  std::string axis;
  std::string preconditioner = "compact";

  void add(CLI::App* app) {
    app->add_option("--grid", grid, "solver rows (columns = 2 * rows)")->capture_default_str();
    app->add_option("--tol", tol, "max |m r - alpha| / alpha")->capture_default_str();
    app->add_option("--max-iter", max_iter)->capture_default_str();
    app->add_option("--step", step, "initial relaxation step")->capture_default_str();
    app->add_option("--axis", axis, "solver grid pole x,y,z");
    app->add_option("--preconditioner", preconditioner)
        ->check(CLI::IsMember({"compact", "wide"}))
        ->capture_default_str();
  }

  SolverParams params() const {
    SolverParams p;
    p.n_theta = grid;
    p.n_phi = 2 * grid;
    p.tol = tol;
    p.max_iter = max_iter;
    p.step = step;
    p.preconditioner = preconditioner == "wide" ? PoissonStencil::Wide : PoissonStencil::Compact;
    if (!axis.empty()) {
      auto m = parse_monitor_spec("type=uniform axis=" + axis);
      p.axis = std::get<AxisymMonitor>(m).axis();
    }
    return p;
  }
};

std::string join(const Vec3& v) {
  return format_diagnostic(v.x()) + ',' + format_diagnostic(v.y()) + ',' + format_diagnostic(v.z());
}

void report_solve(Report& r, const SolveReport& s) {
  r.set("converged", s.converged);
  r.set("iterations", static_cast<long long>(s.iterations));
  r.set("max_residual", s.max_residual);
  r.set("l2_residual", s.l2_residual);
  r.set("alpha", s.alpha);
  r.set("min_area_ratio", s.min_area_ratio);
  r.set("final_step", s.final_step);
  r.set("solver_axis", join(s.axis.vec()));
  if (!s.converged) r.set("warning", std::string("not_converged"));
}

void report_mesh(Report& r, const std::string& prefix, const SphereMesh& mesh) {
  const auto st = mesh_stats(mesh);
  r.set(prefix + "cells", static_cast<long long>(mesh.cell_count()));
  r.set(prefix + "area_ratio", st.area_ratio);
  r.set(prefix + "min_area", st.min_area);
  r.set(prefix + "max_area", st.max_area);
  r.set(prefix + "edge_ratio", st.max_edge / st.min_edge);
  r.set(prefix + "mean_edge", st.mean_edge);
  r.set(prefix + "closed", mesh.is_closed());
}

void write_mesh(const SphereMesh& mesh, const std::string& path, const PointData* data = nullptr) {
  export_mesh(mesh, path, mesh_format_for(path), data);
}

void emit_curve(const Curve& c, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << curve_text(c);
  } else {
    export_curve(c, path);
  }
}

struct QualitySummary {
  double max_q = 0.0;
  double mean_q = 0.0;
  long long infinite = 0;
  long long failed = 0;
};

QualitySummary summarize(const QualityField& f) {
  QualitySummary s;
  long long n = 0;
  for (const auto& q : f.samples) {
    if (std::isinf(q.Q)) {
      ++s.infinite;
    } else if (std::isfinite(q.Q)) {
      s.max_q = std::max(s.max_q, q.Q);
      s.mean_q += q.Q;
      ++n;
    }
  }
  s.failed = static_cast<long long>(f.failed.size()) - s.infinite;
  s.mean_q = n ? s.mean_q / n : std::nan("");
  return s;
}

void report_quality(Report& r, const QualityField& f) {
  const auto s = summarize(f);
  r.set("max_Q", s.max_q);
  r.set("mean_Q", s.mean_q);
  r.set("infinite_Q_samples", s.infinite);
  r.set("failed_samples", s.failed);
}

int finish(const Report& r, const std::string& path, bool converged, std::ostream& err) {
  if (!path.empty()) r.write(path);
  if (!converged) {
    err << "warning code=NotConverged message=\"solver stopped before reaching tol\"\n";
    return 2;
  }
  return 0;
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
    if (c == '"') c = '\'';
  }
  return s;
}

const AxisymMonitor& need_axisym(const ParsedMonitor& m) {
  const auto* a = std::get_if<AxisymMonitor>(&m);
  if (!a) fail(ErrorCode::ValidationError, "this subcommand needs an axisymmetric monitor");
  return *a;
}

double default_cut(const AxisymMonitor& m) {
  return std::visit(
      [](const auto& s) -> double {
        if constexpr (requires { s.theta_cap; }) {
          return s.theta_cap + 0.2;
        } else {
          return 0.2;
        }
      },
      m.shape());
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app("Optimal-transport mesh adaptation on the sphere", "otsphere");
  app.require_subcommand(1);

  std::string monitor, mesh_spec, out_path, report_path, kind = "theta_prime";
  int refinement = 4, samples = 1000;
  double h = 1e-4, radius = std::numbers::pi;
  std::optional<double> cut;
  SolverOpts solver;

  auto* gen = app.add_subcommand("generate-base", "write an unadapted mesh");
  gen->add_option("--mesh", mesh_spec, "icos:r | cubed:n | latlon:nlat,nlon")->required();
  gen->add_option("--out", out_path, ".obj or .vtk")->required();
  gen->add_option("--report", report_path);

  auto* axi = app.add_subcommand("adapt-axisym", "move vertices by the exact axisymmetric map");
  axi->add_option("--monitor", monitor, "spec file or inline spec")->required();
  axi->add_option("--mesh", mesh_spec)->required();
  axi->add_option("--out", out_path)->required();
  axi->add_option("--report", report_path);

  auto* gen_ad = app.add_subcommand("adapt-general", "solve for the transport potential and map a mesh");
  gen_ad->add_option("--monitor", monitor)->required();
  gen_ad->add_option("--mesh", mesh_spec)->required();
  gen_ad->add_option("--out", out_path)->required();
  gen_ad->add_option("--report", report_path);
  solver.add(gen_ad);

  auto* eq = app.add_subcommand("equalize-icos", "equalise icosahedral cell areas");
  eq->add_option("--refinement", refinement)->capture_default_str();
  eq->add_option("--out", out_path)->required();
  eq->add_option("--report", report_path);
  solver.add(eq);

  std::string edge_csv;
  auto* an = app.add_subcommand("analyze", "quality field and mesh statistics of an adapted mesh");
  an->add_option("--monitor", monitor)->required();
  an->add_option("--mesh", mesh_spec)->required();
  an->add_option("--out", out_path, "mesh with point data (.vtk)");
  an->add_option("--report", report_path);
  an->add_option("--edge-csv", edge_csv, "edge length by latitude");
  an->add_option("--jacobian-step", h)->capture_default_str();
  solver.add(an);

  auto* cu = app.add_subcommand("curves", "tables of theta', Q, sigma or m for an axisymmetric monitor");
  cu->add_option("--monitor", monitor)->required();
  cu->add_option("--kind", kind, "theta_prime | Q | sigma | m")->capture_default_str();
  cu->add_option("--samples", samples)->capture_default_str();
  cu->add_option("--out", out_path, "CSV path (stdout when omitted)");

  auto* cp = app.add_subcommand("compare-plane", "skewness on the sphere and on the matched disc");
  cp->add_option("--monitor", monitor)->required();
  cp->add_option("--radius", radius, "disc radius")->capture_default_str();
  cp->add_option("--samples", samples)->capture_default_str();
  cp->add_option("--cut", cut, "secondary peaks are taken beyond this image radius");
  cp->add_option("--out", out_path, "CSV path (stdout when omitted)");
  cp->add_option("--report", report_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error code=ParseError message=\"" << one_line(e.what()) << "\"\n";
    return 1;
  }

  try {
    Report rep;
    if (gen->parsed()) {
      const SphereMesh mesh = parse_mesh_spec(mesh_spec);
      write_mesh(mesh, out_path);
      report_mesh(rep, "", mesh);
      return finish(rep, report_path, true, err);
    }
    if (axi->parsed()) {
      const ParsedMonitor pm = load_monitor_spec(monitor);
      const AxisymMonitor& m = need_axisym(pm);
      const SphereMesh mesh = parse_mesh_spec(mesh_spec);
      const AxisymMap map = build_axisym_map(m);
      const SphereMesh adapted = apply_to_mesh(map, mesh);
      write_mesh(adapted, out_path);
      rep.set("alpha", map.alpha());
      report_mesh(rep, "", adapted);
      return finish(rep, report_path, true, err);
    }
    if (gen_ad->parsed()) {
      const GeneralMonitor m = to_general(load_monitor_spec(monitor));
      const SphereMesh mesh = parse_mesh_spec(mesh_spec);
      auto [adapted, s] = adapt_mesh(m, mesh, solver.params());
      write_mesh(adapted, out_path);
      report_solve(rep, s);
      report_mesh(rep, "", adapted);
      return finish(rep, report_path, s.converged, err);
    }
    if (eq->parsed()) {
      const SphereMesh mesh = icosahedral_mesh(refinement);
      auto [adapted, s] = equalize_mesh(mesh, solver.params());
      write_mesh(adapted, out_path);
      report_solve(rep, s);
      rep.set("area_ratio_before", mesh_stats(mesh).area_ratio);
      rep.set("area_ratio_after", mesh_stats(adapted).area_ratio);
      report_mesh(rep, "before_", mesh);
      report_mesh(rep, "after_", adapted);
      return finish(rep, report_path, s.converged, err);
    }
    if (an->parsed()) {
      const ParsedMonitor pm = load_monitor_spec(monitor);
      const SphereMesh mesh = parse_mesh_spec(mesh_spec);
      std::optional<SphereMesh> adapted;
      QualityField field;
      bool converged = true;
      if (const auto* a = std::get_if<AxisymMonitor>(&pm)) {
        const AxisymMap map = build_axisym_map(*a);
        adapted = apply_to_mesh(map, mesh);
        field = quality_field([&map](const UnitVector& p) { return map_point(map, p); },
                              mesh.vertices(), h, a->axis());
        rep.set("alpha", map.alpha());
      } else {
        const GeneralMonitor& g = std::get<GeneralMonitor>(pm);
        auto res = solve_general(g, solver.params());
        report_solve(rep, res.report);
        converged = res.report.converged;
        const PotentialGrid& u = res.potential;
        adapted = map_mesh(u, mesh);
        field = quality_field([&u](const UnitVector& p) { return map_point(u, p); },
                              mesh.vertices(), h, u.axis());
      }
      report_quality(rep, field);
      report_mesh(rep, "", *adapted);
      if (!out_path.empty()) {
        const PointData d = point_data(field);
        write_mesh(*adapted, out_path, &d);
      }
      if (!edge_csv.empty()) export_curve(edge_latitude_curve(*adapted), edge_csv);
      if (report_path.empty()) out << rep.text();
      return finish(rep, report_path, converged, err);
    }
    if (cu->parsed()) {
      const ParsedMonitor pm = load_monitor_spec(monitor);
      const AxisymMonitor& m = need_axisym(pm);
      const CurveKind k = parse_curve_kind(kind);
      emit_curve(axisym_curve(build_axisym_map(m), k, samples), out_path, out);
      return 0;
    }
    if (cp->parsed()) {
      const ParsedMonitor pm = load_monitor_spec(monitor);
      const AxisymMonitor& m = need_axisym(pm);
      if (samples < 2) fail(ErrorCode::ValidationError, "need at least 2 samples");
      const AxisymMap sphere = build_axisym_map(m);
      const RadialMap plane = build_radial_map(RadialMonitor(m, radius));
      Curve c;
      c.columns = {"t", "theta_prime", "Q_sphere", "R", "Q_plane"};
      std::vector<double> xs, qs, xp, qp;
      for (int i = 1; i < samples; ++i) {
        const double ts = std::numbers::pi * i / samples, tp = radius * i / samples;
        xs.push_back(theta_prime(sphere, ts));
        qs.push_back(skewness_axisym(sphere, ts));
        xp.push_back(radial_image(plane, tp));
        qp.push_back(skewness_radial(plane, tp));
        c.rows.push_back({static_cast<double>(i) / samples, xs.back(), qs.back(), xp.back(), qp.back()});
      }
      const double after = cut ? *cut : default_cut(m);
      rep.set("cut", after);
      rep.set("secondary_peak_sphere", secondary_peak(xs, qs, after));
      rep.set("secondary_peak_plane", secondary_peak(xp, qp, after));
      emit_curve(c, out_path, out);
      if (!report_path.empty()) rep.write(report_path);
      else if (!out_path.empty()) out << rep.text();
      return 0;
    }
  } catch (const Error& e) {
    err << "error code=" << to_string(e.code()) << " message=\"" << one_line(e.what()) << "\"\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error code=Internal message=\"" << one_line(e.what()) << "\"\n";
    return 1;
  }
  return 1;
}

}  // namespace otsphere
