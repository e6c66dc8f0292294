#include "meshsort/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace meshsort {

bool BoundingBox::valid() const {
  return std::isfinite(left) && std::isfinite(top) && std::isfinite(width) &&
         std::isfinite(height) && width > 0.0 && height > 0.0;
}

double intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const double w = std::min(a.right(), b.right()) - std::max(a.left, b.left);
  const double h = std::min(a.bottom(), b.bottom()) - std::max(a.top, b.top);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

BoundingBox expand(const BoundingBox& b, double scale) {
  const double dx = scale * b.width;
  const double dy = scale * b.height;
  return {b.left - dx, b.top - dy, b.width + 2.0 * dx, b.height + 2.0 * dy};
}

double buffered_iou(const BoundingBox& a, const BoundingBox& b, double buffer_scale) {
  if (!(buffer_scale >= 0.0)) {
    throw std::invalid_argument("buffer_scale must be non-negative");
  }
  if (buffer_scale == 0.0) return iou(a, b);
  return iou(expand(a, buffer_scale), expand(b, buffer_scale));
}

Point2 bottom_middle(const BoundingBox& b) {
  return {b.left + 0.5 * b.width, b.top + b.height};
}

Measurement box_to_measurement(const BoundingBox& b) {
  return {b.center_x(), b.center_y(), b.width * b.height, b.width / b.height};
}

BoundingBox measurement_to_box(const Measurement& z) {
  if (!(z[2] > 0.0) || !(z[3] > 0.0)) {
    throw std::invalid_argument("measurement area and aspect ratio must be positive");
  }
  const double w = std::sqrt(z[2] * z[3]);
  const double h = std::sqrt(z[2] / z[3]);
  return {z[0] - 0.5 * w, z[1] - 0.5 * h, w, h};
}

}  // namespace meshsort
