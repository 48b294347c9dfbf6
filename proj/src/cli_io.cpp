#include "otsphere/cli_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace otsphere {

namespace {

using Pairs = std::map<std::string, std::string>;

[[noreturn]] void parse_fail(const std::string& key, const std::string& what) {
  fail(ErrorCode::ParseError, "key '" + key + "': " + what);
}

double to_double(const std::string& key, std::string_view s) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
    parse_fail(key, "not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t p = s.find(sep, start);
    out.push_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

std::vector<double> to_list(const std::string& key, std::string_view s) {
  std::vector<double> out;
  for (auto part : split(s, ',')) out.push_back(to_double(key, part));
  return out;
}

UnitVector to_axis(const std::string& key, std::string_view s) {
  const auto v = to_list(key, s);
  if (v.size() != 3) parse_fail(key, "expected three comma-separated components");
  const Vec3 w(v[0], v[1], v[2]);
  if (!(w.norm() > 0.0) || !w.allFinite()) {
    fail(ErrorCode::ValidationError, "axis must be a finite nonzero vector");
  }
  return UnitVector(w);
}

class Fields {
 public:
  explicit Fields(Pairs p) : pairs_(std::move(p)) {}

  const std::string& raw(const std::string& key) {
    auto it = pairs_.find(key);
    if (it == pairs_.end()) parse_fail(key, "missing");
    used_.insert(key);
    return it->second;
  }
  double num(const std::string& key) { return to_double(key, raw(key)); }
  std::vector<double> list(const std::string& key) { return to_list(key, raw(key)); }
  UnitVector axis() {
    if (!pairs_.count("axis")) return UnitVector(0.0, 0.0, 1.0);
    return to_axis("axis", raw("axis"));
  }
  int integer(const std::string& key) {
    const std::string& s = raw(key);
    int v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) parse_fail(key, "not an integer: '" + s + "'");
    return v;
  }
  void finish() const {
    for (const auto& [k, v] : pairs_) {
      if (!used_.count(k)) parse_fail(k, "unknown for this monitor type");
    }
  }

 private:
  Pairs pairs_;
  std::set<std::string> used_{"type"};
};

Pairs tokenize(std::string_view text) {
  std::string clean;
  bool comment = false;
  for (char c : text) {
    if (c == '#') comment = true;
    if (c == '\n') comment = false;
    clean += comment ? ' ' : c;
  }
  Pairs out;
  std::istringstream in(clean);
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) parse_fail(tok, "expected key=value");
    std::string key = tok.substr(0, eq);
    if (out.count(key)) parse_fail(key, "given twice");
    out.emplace(std::move(key), tok.substr(eq + 1));
  }
  return out;
}

std::string format_with(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) fail(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

}  // namespace

ParsedMonitor parse_monitor_spec(std::string_view text) {
  Fields f(tokenize(text));
  const std::string type = f.raw("type");
  auto done = [&](auto m) -> ParsedMonitor {
    f.finish();
    return m;
  };
  if (type == "uniform") return done(AxisymMonitor::uniform(f.axis()));
  if (type == "tophat") {
    const double r1 = f.num("rho1"), r2 = f.num("rho2"), cap = f.num("theta_cap");
    return done(AxisymMonitor::top_hat(r1, r2, cap, f.axis()));
  }
  if (type == "smoothed_tophat") {
    const double g = f.num("gamma"), cap = f.num("theta_cap"), e = f.num("epsilon");
    return done(AxisymMonitor::smoothed_top_hat(g, cap, e, f.axis()));
  }
  if (type == "sechring") {
    const double b = f.num("beta"), cap = f.num("theta_cap"), e = f.num("epsilon");
    return done(AxisymMonitor::sech_ring(b, cap, e, f.axis()));
  }
  if (type == "deltaring") {
    const double l = f.num("lambda"), cap = f.num("theta_cap");
    return done(AxisymMonitor::delta_ring(l, cap, f.axis()));
  }
  if (type == "piecewise") {
    auto b = f.list("breakpoints");
    auto d = f.list("densities");
    return done(AxisymMonitor::piecewise_constant(std::move(b), std::move(d), f.axis()));
  }
  if (type == "equatorial") {
    const double di = f.num("d_inner"), dout = f.num("d_outer");
    const double li = f.num("lat_inner"), lo = f.num("lat_outer");
    return done(AxisymMonitor::equatorial_spacing(di, dout, li, lo, f.axis()));
  }
  if (type == "crossrings") {
    const auto a = f.list("alpha");
    const auto b = f.list("beta");
    std::vector<UnitVector> axes;
    for (auto part : split(f.raw("axes"), ';')) axes.push_back(to_axis("axes", part));
    if (a.size() != b.size() || a.size() != axes.size()) {
      parse_fail("axes", "alpha, beta and axes need the same number of rings");
    }
    std::vector<general::RingTerm> terms;
    for (std::size_t i = 0; i < a.size(); ++i) terms.push_back({a[i], b[i], axes[i]});
    return done(GeneralMonitor::cross_rings(std::move(terms)));
  }
  if (type == "sinband") {
    const double a = f.num("alpha"), b = f.num("beta"), c = f.num("theta_c"), t = f.num("theta_a");
    const int k = f.integer("k");
    return done(GeneralMonitor::sinusoidal_band(a, b, c, t, k));
  }
  parse_fail("type", "unknown monitor type '" + type + "'");
}

ParsedMonitor load_monitor_spec(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) {
    std::ifstream in(arg);
    if (!in) fail(ErrorCode::IoError, "cannot read '" + arg + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_monitor_spec(ss.str());
  }
  return parse_monitor_spec(arg);
}

GeneralMonitor to_general(const ParsedMonitor& m) {
  if (const auto* a = std::get_if<AxisymMonitor>(&m)) return GeneralMonitor::wrap(*a);
  return std::get<GeneralMonitor>(m);
}

SphereMesh parse_mesh_spec(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) parse_fail("mesh", "expected family:resolution");
  const std::string fam(text.substr(0, colon));
  const auto args = to_list("mesh", text.substr(colon + 1));
  auto as_int = [&](double v) {
    if (v != std::floor(v) || std::abs(v) > 1e6) parse_fail("mesh", "resolution must be an integer");
    return static_cast<int>(v);
  };
  if (fam == "icos" && args.size() == 1) return icosahedral_mesh(as_int(args[0]));
  if (fam == "cubed" && args.size() == 1) return cubed_sphere_mesh(as_int(args[0]));
  if (fam == "latlon" && args.size() == 2) return latlon_mesh(as_int(args[0]), as_int(args[1]));
  parse_fail("mesh", "unknown mesh '" + std::string(text) + "'");
}

std::string format_geometry(double v) { return format_with(v, 17); }
std::string format_diagnostic(double v) { return format_with(v, 6); }

MeshFormat mesh_format_for(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".obj") return MeshFormat::Obj;
  if (ext == ".vtk") return MeshFormat::VtkLegacy;
  parse_fail("out", "unsupported mesh extension '" + ext + "' (use .obj or .vtk)");
}

PointData point_data(const QualityField& field) {
  PointData d;
  const std::size_t n = field.samples.size();
  d.Q.resize(n);
  d.s.resize(n);
  d.u1_scaled.assign(n, Vec3::Zero());
  d.u2_scaled.assign(n, Vec3::Zero());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& q = field.samples[i];
    d.Q[i] = q.Q;
    d.s[i] = q.s;
    if (std::isfinite(q.Q)) {
      d.u1_scaled[i] = q.sigma1 * q.u1;
      d.u2_scaled[i] = q.sigma2 * q.u2;
    }
  }
  return d;
}

void export_mesh(const SphereMesh& mesh, const std::filesystem::path& path, MeshFormat format,
                 const PointData* data) {
  auto out = open_out(path);
  const auto& vs = mesh.vertices();
  auto vec = [](const Vec3& v) {
    return format_geometry(v.x()) + ' ' + format_geometry(v.y()) + ' ' + format_geometry(v.z());
  };
  if (format == MeshFormat::Obj) {
    for (const auto& v : vs) out << "v " << vec(v.vec()) << '\n';
    for (const auto& c : mesh.cells()) {
      out << 'f';
      for (auto i : c.indices()) out << ' ' << i + 1;
      out << '\n';
    }
    close_out(out, path);
    return;
  }
  out << "# vtk DataFile Version 2.0\notsphere mesh\nASCII\nDATASET POLYDATA\n";
  out << "POINTS " << vs.size() << " double\n";
  for (const auto& v : vs) out << vec(v.vec()) << '\n';
  std::size_t total = 0;
  for (const auto& c : mesh.cells()) total += c.size + 1;
  out << "POLYGONS " << mesh.cell_count() << ' ' << total << '\n';
  for (const auto& c : mesh.cells()) {
    out << static_cast<int>(c.size);
    for (auto i : c.indices()) out << ' ' << i;
    out << '\n';
  }
  if (data) {
    auto check = [&](std::size_t n) {
      if (n != vs.size()) fail(ErrorCode::ValidationError, "point data length differs from vertex count");
    };
    check(data->Q.size());
    check(data->s.size());
    check(data->u1_scaled.size());
    check(data->u2_scaled.size());
    out << "POINT_DATA " << vs.size() << '\n';
    for (auto [name, vals] : {std::pair{"Q", &data->Q}, std::pair{"s", &data->s}}) {
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : *vals) out << format_diagnostic(v) << '\n';
    }
    for (auto [name, vals] : {std::pair{"u1_scaled", &data->u1_scaled},
                              std::pair{"u2_scaled", &data->u2_scaled}}) {
      out << "VECTORS " << name << " double\n";
      for (const Vec3& v : *vals) {
        out << format_diagnostic(v.x()) << ' ' << format_diagnostic(v.y()) << ' '
            << format_diagnostic(v.z()) << '\n';
      }
    }
  }
  close_out(out, path);
}

std::vector<Vec3> read_obj_vertices(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot read '" + path.string() + "'");
  std::vector<Vec3> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("v ", 0) != 0) continue;
    std::istringstream ls(line.substr(2));
    std::string a, b, c;
    if (!(ls >> a >> b >> c)) parse_fail("v", "short vertex line");
    out.emplace_back(to_double("v", a), to_double("v", b), to_double("v", c));
  }
  return out;
}

std::string curve_text(const Curve& curve) {
  std::string s;
  for (std::size_t i = 0; i < curve.columns.size(); ++i) {
    s += (i ? "," : "") + curve.columns[i];
  }
  s += '\n';
  for (const auto& row : curve.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + format_geometry(row[i]);
    s += '\n';
  }
  return s;
}

void export_curve(const Curve& curve, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << curve_text(curve);
  close_out(out, path);
}

CurveKind parse_curve_kind(std::string_view name) {
  if (name == "theta_prime") return CurveKind::ThetaPrime;
  if (name == "Q") return CurveKind::Q;
  if (name == "sigma") return CurveKind::Sigma;
  if (name == "m") return CurveKind::Monitor;
  parse_fail("kind", "unknown curve kind '" + std::string(name) + "'");
}

Curve axisym_curve(const AxisymMap& map, CurveKind kind, int n) {
  if (n < 2) fail(ErrorCode::ValidationError, "need at least 2 curve samples");
  constexpr double pi = std::numbers::pi;
  std::vector<double> ts;
  for (int i = 0; i < n; ++i) ts.push_back(pi * i / (n - 1));
  for (double t : {map.cap_preimage(), map.theta1(), map.theta2()}) {
    if (!std::isfinite(t)) continue;
    ts.push_back(std::nextafter(t, 0.0));
    ts.push_back(t);
    ts.push_back(std::nextafter(t, pi));
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  Curve c;
  switch (kind) {
    case CurveKind::ThetaPrime: c.columns = {"theta", "theta_prime"}; break;
    case CurveKind::Q: c.columns = {"theta_prime", "Q"}; break;
    case CurveKind::Sigma: c.columns = {"theta", "theta_prime", "sigma_zonal", "sigma_meridional"}; break;
    case CurveKind::Monitor: c.columns = {"theta_prime", "m"}; break;
  }
  for (double t : ts) {
    const double tp = theta_prime(map, t);
    switch (kind) {
      case CurveKind::ThetaPrime: c.rows.push_back({t, tp}); break;
      case CurveKind::Q: c.rows.push_back({tp, skewness_axisym(map, t)}); break;
      case CurveKind::Sigma:
        if (map.in_plateau(t)) {
          c.rows.push_back({t, tp, std::sin(tp) / std::sin(t), 0.0});
        } else {
          const auto [s1, s2] = singular_values_axisym(map, t);
          c.rows.push_back({t, tp, s1, s2});
        }
        break;
      case CurveKind::Monitor: c.rows.push_back({tp, eval_axisym(map.monitor(), tp)}); break;
    }
  }
  return c;
}

Curve edge_latitude_curve(const SphereMesh& mesh, double bin_deg) {
  Curve c;
  c.columns = {"latitude_deg", "normalized_edge_length", "count"};
  for (const auto& b : mesh_stats(mesh, bin_deg).edge_length_by_latitude) {
    c.rows.push_back({b.latitude_deg, b.mean_normalized_length, static_cast<double>(b.count)});
  }
  return c;
}

void Report::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}
void Report::set(const std::string& key, double value) { set(key, format_diagnostic(value)); }
void Report::set(const std::string& key, long long value) { set(key, std::to_string(value)); }
void Report::set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }

std::string Report::text() const {
  std::string s;
  for (const auto& [k, v] : entries_) s += k + '=' + v + '\n';
  return s;
}

void Report::write(const std::filesystem::path& path) const {
  auto out = open_out(path);
  out << text();
  close_out(out, path);
}

}  // namespace otsphere
