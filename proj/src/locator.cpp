#include "otsphere/locator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace otsphere {

CellLocator::CellLocator(const SphereMesh& mesh) : mesh_(&mesh) {
  const auto& verts = mesh.vertices();
  const std::size_t nc = mesh.cell_count();
  // Roughly one cell width per voxel.
  const double cell_width = std::sqrt(4.0 * std::numbers::pi / std::max<std::size_t>(nc, 1));
  res_ = std::clamp(static_cast<int>(2.0 / cell_width), 1, 128);

  std::vector<std::vector<std::uint32_t>> bins(static_cast<std::size_t>(res_) * res_ * res_);
  auto clamp_index = [&](double t) {
    return std::clamp(static_cast<int>((t + 1.0) * 0.5 * res_), 0, res_ - 1);
  };
  for (std::size_t ci = 0; ci < nc; ++ci) {
    const Cell& c = mesh.cells()[ci];
    Vec3 lo = Vec3::Constant(2.0), hi = Vec3::Constant(-2.0);
    Vec3 centroid = Vec3::Zero();
    for (std::size_t i = 0; i < c.size; ++i) {
      const Vec3& p = verts[c.v[i]].vec();
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
      centroid += p;
    }
    // The spherical cell bulges outside the chordal box by at most
    // 1 - cos(radius); pad by that plus a margin.
    centroid.normalize();
    double radius = 0.0;
    for (std::size_t i = 0; i < c.size; ++i) {
      radius = std::max(radius, std::acos(std::clamp(centroid.dot(verts[c.v[i]].vec()), -1.0, 1.0)));
    }
    const double pad = (1.0 - std::cos(radius)) + 1e-9;
    lo = lo.cwiseMin(centroid) - Vec3::Constant(pad);
    hi = hi.cwiseMax(centroid) + Vec3::Constant(pad);
    for (int i = clamp_index(lo.x()); i <= clamp_index(hi.x()); ++i) {
      for (int j = clamp_index(lo.y()); j <= clamp_index(hi.y()); ++j) {
        for (int k = clamp_index(lo.z()); k <= clamp_index(hi.z()); ++k) {
          bins[(static_cast<std::size_t>(i) * res_ + j) * res_ + k].push_back(
              static_cast<std::uint32_t>(ci));
        }
      }
    }
  }
  offsets_.reserve(bins.size() + 1);
  offsets_.push_back(0);
  for (const auto& b : bins) {
    entries_.insert(entries_.end(), b.begin(), b.end());
    offsets_.push_back(static_cast<std::uint32_t>(entries_.size()));
  }
}

std::size_t CellLocator::voxel_of(const Vec3& p) const {
  auto idx = [&](double t) {
    return std::clamp(static_cast<int>((t + 1.0) * 0.5 * res_), 0, res_ - 1);
  };
  return (static_cast<std::size_t>(idx(p.x())) * res_ + idx(p.y())) * res_ + idx(p.z());
}

bool CellLocator::contains(std::size_t cell, const Vec3& x) const {
  const Cell& c = mesh_->cells()[cell];
  const auto& verts = mesh_->vertices();
  for (std::size_t i = 0; i < c.size; ++i) {
    const Vec3& a = verts[c.v[i]].vec();
    const Vec3& b = verts[c.v[(i + 1) % c.size]].vec();
    if (a.cross(b).dot(x) < -1e-13) return false;
  }
  return true;
}

std::optional<std::size_t> CellLocator::locate(const UnitVector& x) const {
  const std::size_t v = voxel_of(x.vec());
  for (std::uint32_t e = offsets_[v]; e < offsets_[v + 1]; ++e) {
    if (contains(entries_[e], x.vec())) return entries_[e];
  }
  return std::nullopt;
}

}  // namespace otsphere
