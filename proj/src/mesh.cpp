#include "meshsort/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace meshsort {

double ThresholdFn::operator()(bool frequent, double t) const {
  return frequent ? 0.0 : lambda * t;
}

double threshold(const ThresholdFn& fn, bool frequent, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("threshold time must be positive");
  return fn(frequent, t);
}

MeshGrid::MeshGrid(int m, int n, double frame_width, double frame_height)
    : m_(m), n_(n), width_(frame_width), height_(frame_height) {
  if (m <= 0 || n <= 0) throw std::invalid_argument("mesh segmentation counts must be positive");
  if (!(frame_width > 0.0) || !(frame_height > 0.0)) {
    throw std::invalid_argument("frame size must be positive");
  }
  counts_.assign(static_cast<std::size_t>(m * n), 0);
  state_.assign(static_cast<std::size_t>(m * n), 0);
}

CellId MeshGrid::cell_of(const Point2& p) const {
  auto bucket = [](double v, int segments, double extent) {
    const double raw = std::floor(v * segments / extent);
    if (!(raw >= 0.0)) return 0;  // also catches NaN
    if (raw >= segments - 1) return segments - 1;
    return static_cast<int>(raw);
  };
  return {bucket(p.x, m_, width_), bucket(p.y, n_, height_)};
}

CellId MeshGrid::record_lost(const Point2& p) {
  const CellId c = cell_of(p);
  ++counts_[index(c)];
  return c;
}

CellId MeshGrid::record_refound(const Point2& p) {
  const CellId c = cell_of(p);
  --counts_[index(c)];
  return c;
}

const std::vector<CellId>& MeshGrid::identify(const ThresholdFn& fn, double t) {
  frequent_.clear();
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < n_; ++j) {
      const CellId c{i, j};
      const auto k = index(c);
      const bool frequent = static_cast<double>(counts_[k]) > threshold(fn, state_[k] != 0, t);
      state_[k] = frequent ? 1 : 0;
      if (frequent) frequent_.push_back(c);
    }
  }
  return frequent_;
}

MeshSnapshot MeshGrid::snapshot(std::int64_t frame) const {
  return {m_, n_, frame, counts_, frequent_};
}

std::string MeshSnapshot::serialize() const {
  std::ostringstream os;
  os << "mesh " << m << ' ' << n << " frame " << frame << '\n';
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) {
      if (i) os << ' ';
      os << count(i, j);
    }
    os << '\n';
  }
  os << "frequent:";
  for (const auto& c : frequent) os << " (" << c.i << ',' << c.j << ')';
  os << '\n';
  return os.str();
}

MeshSnapshot MeshSnapshot::parse(std::string_view text) {
  std::istringstream is{std::string(text)};
  MeshSnapshot s;
  std::string word;
  if (!(is >> word) || word != "mesh" || !(is >> s.m >> s.n >> word) || word != "frame" ||
      !(is >> s.frame) || s.m <= 0 || s.n <= 0) {
    throw std::invalid_argument("bad mesh snapshot header");
  }
  s.counts.resize(static_cast<std::size_t>(s.m * s.n));
  for (auto& c : s.counts) {
    if (!(is >> c)) throw std::invalid_argument("truncated mesh snapshot counts");
  }
  if (!(is >> word) || word != "frequent:") {
    throw std::invalid_argument("missing frequent line in mesh snapshot");
  }
  while (is >> word) {
    CellId c;
    char tail = 0;
    if (std::sscanf(word.c_str(), "(%d,%d%c", &c.i, &c.j, &tail) != 3 || tail != ')') {
      throw std::invalid_argument("bad cell in mesh snapshot: " + word);
    }
    s.frequent.push_back(c);
  }
  return s;
}

}  // namespace meshsort
