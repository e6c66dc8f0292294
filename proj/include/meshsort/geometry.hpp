#pragma once

#include <Eigen/Core>

namespace meshsort {

/// Axis-aligned box in continuous pixel coordinates (top-left corner + size).
struct BoundingBox {
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;

  double right() const { return left + width; }
  double bottom() const { return top + height; }
  double area() const { return width * height; }
  double center_x() const { return left + 0.5 * width; }
  double center_y() const { return top + 0.5 * height; }

  /// True when all fields are finite and the size is strictly positive.
  bool valid() const;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Observation vector [x_c, y_c, area, width/height].
using Measurement = Eigen::Vector4d;

double intersection_area(const BoundingBox& a, const BoundingBox& b);

double iou(const BoundingBox& a, const BoundingBox& b);

/// Grows the box about its center by `scale * width` on the left and right
/// and `scale * height` on the top and bottom.
BoundingBox expand(const BoundingBox& b, double scale);

/// IoU of both boxes after `expand(., buffer_scale)`. Throws
/// std::invalid_argument for a negative scale.
double buffered_iou(const BoundingBox& a, const BoundingBox& b, double buffer_scale);

/// Bottom-middle point, used as the object's ground-contact location.
Point2 bottom_middle(const BoundingBox& b);

Measurement box_to_measurement(const BoundingBox& b);

/// Inverse of box_to_measurement. Throws std::invalid_argument when the area
/// or aspect ratio is not strictly positive.
BoundingBox measurement_to_box(const Measurement& z);

}  // namespace meshsort
