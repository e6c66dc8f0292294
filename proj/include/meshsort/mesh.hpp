#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "meshsort/geometry.hpp"

namespace meshsort {

/// Cell index: i is the column (horizontal), j the row (vertical).
struct CellId {
  int i = 0;
  int j = 0;

  friend auto operator<=>(const CellId&, const CellId&) = default;
};

/// Linear time-variant threshold: lambda * t for a cell that is not yet
/// frequent, 0 for one that already is.
struct ThresholdFn {
  double lambda = 0.02;

  double operator()(bool frequent, double t) const;
};

/// Throws std::invalid_argument unless t > 0.
double threshold(const ThresholdFn& fn, bool frequent, double t);

/// Plain-text view of a grid at one frame.
struct MeshSnapshot {
  int m = 0;
  int n = 0;
  std::int64_t frame = 0;
  std::vector<std::int64_t> counts;  ///< row-major, counts[j * m + i]
  std::vector<CellId> frequent;      ///< ascending

  std::int64_t count(int i, int j) const { return counts[static_cast<std::size_t>(j * m + i)]; }

  /// "mesh m n frame t", n rows of m integers, then "frequent: (i,j) ...".
  std::string serialize() const;
  static MeshSnapshot parse(std::string_view text);

  friend bool operator==(const MeshSnapshot&, const MeshSnapshot&) = default;
};

/// Uniform m x n subdivision of the frame with signed lost-minus-refound
/// counts per cell and the derived frequent-loss set.
class MeshGrid {
 public:
  MeshGrid(int m, int n, double frame_width, double frame_height);

  int columns() const { return m_; }
  int rows() const { return n_; }
  double frame_width() const { return width_; }
  double frame_height() const { return height_; }

  /// floor(x * m / W), floor(y * n / H), clamped to the grid.
  CellId cell_of(const Point2& p) const;

  CellId record_lost(const Point2& p);
  CellId record_refound(const Point2& p);

  std::int64_t count(CellId c) const { return counts_[index(c)]; }
  bool is_frequent(CellId c) const { return state_[index(c)] != 0; }

  /// Recomputes every cell's membership from c > h(s, t) and returns the
  /// frequent set in ascending order.
  const std::vector<CellId>& identify(const ThresholdFn& fn, double t);
  const std::vector<CellId>& frequent() const { return frequent_; }

  MeshSnapshot snapshot(std::int64_t frame) const;

 private:
  std::size_t index(CellId c) const { return static_cast<std::size_t>(c.j * m_ + c.i); }

  int m_;
  int n_;
  double width_;
  double height_;
  std::vector<std::int64_t> counts_;
  std::vector<unsigned char> state_;
  std::vector<CellId> frequent_;
};

}  // namespace meshsort
