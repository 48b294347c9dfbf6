#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "otsphere/mesh.hpp"

namespace otsphere {

/// Point-in-cell queries on a fixed SphereMesh. Cells are binned into a
/// uniform voxel grid over [-1, 1]^3 by their (bulge-padded) bounding boxes.
class CellLocator {
 public:
  explicit CellLocator(const SphereMesh& mesh);

  /// Index of a cell containing x (boundary points resolve to one of the
  /// adjacent cells), or nullopt.
  std::optional<std::size_t> locate(const UnitVector& x) const;

 private:
  std::size_t voxel_of(const Vec3& p) const;
  bool contains(std::size_t cell, const Vec3& x) const;

  const SphereMesh* mesh_;
  int res_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> entries_;
};

}  // namespace otsphere
