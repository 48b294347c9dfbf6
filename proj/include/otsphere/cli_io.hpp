#pragma once

// Monitor-spec parsing, mesh/curve/report writers.

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "otsphere/axisym_map.hpp"
#include "otsphere/mesh.hpp"
#include "otsphere/monitors.hpp"
#include "otsphere/quality.hpp"

namespace otsphere {

using ParsedMonitor = std::variant<AxisymMonitor, GeneralMonitor>;

/// Whitespace-separated key=value pairs; `#` starts a comment. Types:
///   uniform
///   tophat rho1 rho2 theta_cap
///   smoothed_tophat gamma theta_cap epsilon
///   sechring beta theta_cap epsilon
///   deltaring lambda theta_cap
///   piecewise breakpoints=b0,b1,.. densities=d0,..
///   equatorial d_inner d_outer lat_inner lat_outer
///   crossrings alpha=a1,a2,.. beta=b1,.. axes=x,y,z;x,y,z;..
///   sinband alpha beta theta_c theta_a k
/// Axisymmetric types accept axis=x,y,z (default 0,0,1, normalised).
/// ParseError names the offending key; ValidationError as from the monitor.
ParsedMonitor parse_monitor_spec(std::string_view text);

/// Reads `arg` as a file if one exists at that path, otherwise as inline text.
ParsedMonitor load_monitor_spec(const std::string& arg);

GeneralMonitor to_general(const ParsedMonitor& m);

/// `icos:r`, `cubed:n` or `latlon:nlat,nlon`.
SphereMesh parse_mesh_spec(std::string_view text);

std::string format_geometry(double v);
std::string format_diagnostic(double v);

enum class MeshFormat { Obj, VtkLegacy };

/// .obj or .vtk; ParseError otherwise.
MeshFormat mesh_format_for(const std::filesystem::path& path);

struct PointData {
  std::vector<double> Q;
  std::vector<double> s;
  std::vector<Vec3> u1_scaled;
  std::vector<Vec3> u2_scaled;
};

/// sigma_i u_i per sample; failed samples keep their Q flag and get zeros.
PointData point_data(const QualityField& field);

/// IoError when the file cannot be written. Point data is VTK only.
void export_mesh(const SphereMesh& mesh, const std::filesystem::path& path, MeshFormat format,
                 const PointData* data = nullptr);

/// `v` lines of an OBJ file.
std::vector<Vec3> read_obj_vertices(const std::filesystem::path& path);

struct Curve {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void export_curve(const Curve& curve, const std::filesystem::path& path);
std::string curve_text(const Curve& curve);

enum class CurveKind { ThetaPrime, Q, Sigma, Monitor };

/// ParseError for unknown names (theta_prime, Q, sigma, m).
CurveKind parse_curve_kind(std::string_view name);

/// n samples of theta uniform in [0, pi] plus the cap and plateau end points
/// and their floating-point neighbours (one-sided limits).
Curve axisym_curve(const AxisymMap& map, CurveKind kind, int n);

/// latitude_deg,normalized_edge_length,count from mesh_stats bins.
Curve edge_latitude_curve(const SphereMesh& mesh, double bin_deg = 2.0);

/// Ordered key=value lines.
class Report {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);
  void set(const std::string& key, bool value);
  std::string text() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace otsphere
