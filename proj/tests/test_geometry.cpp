#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "meshsort/geometry.hpp"
#include "meshsort/rng.hpp"

using namespace meshsort;

namespace {

BoundingBox random_box(Rng& rng) {
  return {-200 + 2000 * rng.uniform(), -200 + 1200 * rng.uniform(), 0.5 + 300 * rng.uniform(),
          0.5 + 400 * rng.uniform()};
}

}  // namespace

TEST_CASE("iou examples") {
  const BoundingBox a{0, 0, 10, 10};
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, {100, 100, 10, 10}) == 0.0);
  CHECK(iou(a, {5, 0, 10, 10}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  // Touching edges do not overlap.
  CHECK(iou(a, {10, 0, 10, 10}) == 0.0);
}

TEST_CASE("buffered iou examples") {
  const BoundingBox a{0, 0, 10, 10};
  CHECK(buffered_iou(a, {5, 0, 10, 10}, 0.0) == iou(a, {5, 0, 10, 10}));
  CHECK(buffered_iou(a, a, 0.5) == 1.0);
  const BoundingBox far{12, 0, 10, 10};
  CHECK(iou(a, far) == 0.0);
  // Both grow to width 16: [-3, 13] and [9, 25] overlap by 4 columns.
  CHECK(buffered_iou(a, far, 0.3) == doctest::Approx(4.0 * 16.0 / (2 * 256.0 - 64.0)));
  CHECK_THROWS_AS(buffered_iou(a, far, -0.1), std::invalid_argument);

  const BoundingBox e = expand({10, 20, 30, 40}, 0.5);
  CHECK(e.left == -5.0);
  CHECK(e.top == 0.0);
  CHECK(e.width == 60.0);
  CHECK(e.height == 80.0);
}

TEST_CASE("bottom middle") {
  CHECK(bottom_middle({0, 0, 10, 10}) == Point2{5, 10});
  CHECK(bottom_middle({100, 50, 20, 40}) == Point2{110, 90});
  CHECK(bottom_middle({0, 0, 0.5, 0.5}) == Point2{0.25, 0.5});
}

TEST_CASE("measurement conversion") {
  CHECK(box_to_measurement({0, 0, 10, 10}) == Measurement(5, 5, 100, 1));
  CHECK(box_to_measurement({0, 0, 20, 10}) == Measurement(10, 5, 200, 2));
  CHECK_THROWS_AS(measurement_to_box(Measurement(0, 0, 0, 1)), std::invalid_argument);
  CHECK_THROWS_AS(measurement_to_box(Measurement(0, 0, 10, -1)), std::invalid_argument);
}

TEST_CASE("box validity") {
  CHECK(BoundingBox{0, 0, 1, 1}.valid());
  CHECK_FALSE(BoundingBox{0, 0, 0, 1}.valid());
  CHECK_FALSE(BoundingBox{0, 0, 1, -1}.valid());
  CHECK_FALSE(BoundingBox{NAN, 0, 1, 1}.valid());
  CHECK_FALSE(BoundingBox{0, INFINITY, 1, 1}.valid());
}

TEST_CASE("property: iou symmetric, bounded, 1 only for identical boxes") {
  Rng rng(101);
  for (int k = 0; k < 5000; ++k) {
    const BoundingBox a = random_box(rng);
    const BoundingBox b = rng.uniform() < 0.2 ? a : random_box(rng);
    const double v = iou(a, b);
    REQUIRE(v == iou(b, a));
    REQUIRE(v >= 0.0);
    REQUIRE(v <= 1.0);
    if (a == b) {
      REQUIRE(v == doctest::Approx(1.0).epsilon(1e-12));
    } else {
      REQUIRE(v < 1.0);
    }
  }
}

TEST_CASE("property: buffered iou at scale 0 equals iou") {
  Rng rng(102);
  for (int k = 0; k < 2000; ++k) {
    const BoundingBox a = random_box(rng);
    const BoundingBox b = random_box(rng);
    REQUIRE(buffered_iou(a, b, 0.0) == iou(a, b));
  }
}

TEST_CASE("property: buffered iou is non-decreasing in the buffer scale") {
  Rng rng(103);
  for (int k = 0; k < 3000; ++k) {
    const BoundingBox a = random_box(rng);
    BoundingBox b = random_box(rng);
    if (rng.uniform() < 0.5) {
      // Keep half of the pairs close so the overlap is non-trivial.
      b.left = a.left + (rng.uniform() - 0.5) * 2 * a.width;
      b.top = a.top + (rng.uniform() - 0.5) * 2 * a.height;
    }
    double prev = buffered_iou(a, b, 0.0);
    for (double s = 0.05; s <= 2.0; s += 0.05) {
      const double v = buffered_iou(a, b, s);
      REQUIRE(v >= prev - 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("property: box and measurement round trip") {
  Rng rng(104);
  for (int k = 0; k < 5000; ++k) {
    const BoundingBox b = random_box(rng);
    const BoundingBox r = measurement_to_box(box_to_measurement(b));
    REQUIRE(std::fabs(r.left - b.left) <= 1e-9 * (1 + std::fabs(b.left)));
    REQUIRE(std::fabs(r.top - b.top) <= 1e-9 * (1 + std::fabs(b.top)));
    REQUIRE(std::fabs(r.width - b.width) <= 1e-9 * b.width);
    REQUIRE(std::fabs(r.height - b.height) <= 1e-9 * b.height);
  }
}
