// Slow, obviously-correct reference implementations used as test oracles.
// They share no code with the library beyond the plain data types.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "meshsort/metrics.hpp"
#include "meshsort/mesh.hpp"

namespace oracle {

using meshsort::BoundingBox;
using meshsort::Trajectories;

inline double box_iou(const BoundingBox& a, const BoundingBox& b) {
  const double w = std::min(a.left + a.width, b.left + b.width) - std::max(a.left, b.left);
  const double h = std::min(a.top + a.height, b.top + b.height) - std::max(a.top, b.top);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  const double inter = w * h;
  return inter / (a.width * a.height + b.width * b.height - inter);
}

/// Every partial injective row -> column map. `fn` receives row_to_col with
/// -1 for unmatched rows.
inline void for_each_matching(int rows, int cols, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> pick(static_cast<std::size_t>(rows), -1);
  std::vector<char> used(static_cast<std::size_t>(cols), 0);
  std::function<void(int)> rec = [&](int r) {
    if (r == rows) {
      fn(pick);
      return;
    }
    pick[static_cast<std::size_t>(r)] = -1;
    rec(r + 1);
    for (int c = 0; c < cols; ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      used[static_cast<std::size_t>(c)] = 1;
      pick[static_cast<std::size_t>(r)] = c;
      rec(r + 1);
      used[static_cast<std::size_t>(c)] = 0;
    }
    pick[static_cast<std::size_t>(r)] = -1;
  };
  rec(0);
}

/// Minimum of sum(c - gate) over matchings that only use entries <= gate.
inline double gated_min(const Eigen::MatrixXd& c, double gate) {
  double best = 0.0;
  for_each_matching(static_cast<int>(c.rows()), static_cast<int>(c.cols()), [&](const std::vector<int>& p) {
    double s = 0.0;
    for (std::size_t r = 0; r < p.size(); ++r) {
      if (p[r] < 0) continue;
      const double v = c(static_cast<Eigen::Index>(r), p[r]);
      if (v > gate) return;
      s += v - gate;
    }
    best = std::min(best, s);
  });
  return best;
}

/// (largest cardinality, smallest cost at that cardinality) among entries <= gate.
inline std::pair<int, double> max_cardinality_min(const Eigen::MatrixXd& c, double gate) {
  int best_n = 0;
  double best_cost = 0.0;
  for_each_matching(static_cast<int>(c.rows()), static_cast<int>(c.cols()), [&](const std::vector<int>& p) {
    int n = 0;
    double s = 0.0;
    for (std::size_t r = 0; r < p.size(); ++r) {
      if (p[r] < 0) continue;
      const double v = c(static_cast<Eigen::Index>(r), p[r]);
      if (v > gate) return;
      ++n;
      s += v;
    }
    if (n > best_n || (n == best_n && s < best_cost)) {
      best_n = n;
      best_cost = s;
    }
  });
  return {best_n, best_cost};
}

/// Event log replayed by recounting from scratch.
struct MeshLog {
  int m, n;
  double w, h;
  std::vector<std::pair<std::pair<int, int>, int>> events;  // cell, +1 lost / -1 refound
  std::set<std::pair<int, int>> frequent;

  std::pair<int, int> cell(double x, double y) const {
    int i = static_cast<int>(std::floor(x * m / w));
    int j = static_cast<int>(std::floor(y * n / h));
    return {std::clamp(i, 0, m - 1), std::clamp(j, 0, n - 1)};
  }
  void lost(double x, double y) { events.push_back({cell(x, y), +1}); }
  void refound(double x, double y) { events.push_back({cell(x, y), -1}); }
  std::int64_t count(int i, int j) const {
    std::int64_t c = 0;
    for (const auto& [where, d] : events) {
      if (where == std::pair{i, j}) c += d;
    }
    return c;
  }
  void identify(double lambda, double t) {
    std::set<std::pair<int, int>> next;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        const double thr = frequent.contains({i, j}) ? 0.0 : lambda * t;
        if (static_cast<double>(count(i, j)) > thr) next.insert({i, j});
      }
    }
    frequent = std::move(next);
  }
};

// ---------------------------------------------------------------- metrics

struct Frame {
  std::vector<std::pair<int, BoundingBox>> gt, res;
};

inline std::map<std::int64_t, Frame> frames_of(const Trajectories& gt, const Trajectories& res) {
  std::map<std::int64_t, Frame> out;
  for (const auto& [id, boxes] : gt) {
    for (const auto& [f, b] : boxes) out[f].gt.emplace_back(id, b);
  }
  for (const auto& [id, boxes] : res) {
    for (const auto& [f, b] : boxes) out[f].res.emplace_back(id, b);
  }
  return out;
}

struct Clear {
  std::int64_t fp = 0, fn = 0, idsw = 0, fm = 0, mt = 0, ml = 0, gt = 0;
  double mota = 0.0;
};

/// CLEAR-MOT by enumeration: previous pairs kept while IoU >= thr, the rest
/// matched with maximum cardinality and then minimum total (1 - IoU).
inline Clear clear(const Trajectories& gt, const Trajectories& res, double thr = 0.5) {
  Clear out;
  std::map<int, int> last;
  std::map<int, std::set<std::int64_t>> covered;
  for (const auto& [f, fr] : frames_of(gt, res)) {
    std::vector<std::pair<int, int>> matched;
    std::vector<char> gu(fr.gt.size(), 0), ru(fr.res.size(), 0);
    for (std::size_t g = 0; g < fr.gt.size(); ++g) {
      if (!last.contains(fr.gt[g].first)) continue;
      for (std::size_t r = 0; r < fr.res.size(); ++r) {
        if (!ru[r] && fr.res[r].first == last[fr.gt[g].first] && box_iou(fr.gt[g].second, fr.res[r].second) >= thr) {
          gu[g] = ru[r] = 1;
          matched.emplace_back(fr.gt[g].first, fr.res[r].first);
        }
      }
    }
    std::vector<std::size_t> fg, fres;
    for (std::size_t g = 0; g < fr.gt.size(); ++g) {
      if (!gu[g]) fg.push_back(g);
    }
    for (std::size_t r = 0; r < fr.res.size(); ++r) {
      if (!ru[r]) fres.push_back(r);
    }
    int best_n = -1;
    double best_cost = 0.0;
    std::vector<int> best;
    for_each_matching(static_cast<int>(fg.size()), static_cast<int>(fres.size()), [&](const std::vector<int>& p) {
      int n = 0;
      double cost = 0.0;
      for (std::size_t a = 0; a < p.size(); ++a) {
        if (p[a] < 0) continue;
        const double v = box_iou(fr.gt[fg[a]].second, fr.res[fres[static_cast<std::size_t>(p[a])]].second);
        if (v < thr) return;
        ++n;
        cost += 1.0 - v;
      }
      if (n > best_n || (n == best_n && cost < best_cost)) {
        best_n = n;
        best_cost = cost;
        best = p;
      }
    });
    for (std::size_t a = 0; a < best.size(); ++a) {
      if (best[a] >= 0) matched.emplace_back(fr.gt[fg[a]].first, fr.res[fres[static_cast<std::size_t>(best[a])]].first);
    }
    for (const auto& [g, r] : matched) {
      if (last.contains(g) && last[g] != r) ++out.idsw;
      last[g] = r;
      covered[g].insert(f);
    }
    out.fn += static_cast<std::int64_t>(fr.gt.size() - matched.size());
    out.fp += static_cast<std::int64_t>(fr.res.size() - matched.size());
  }
  for (const auto& [id, boxes] : gt) {
    out.gt += static_cast<std::int64_t>(boxes.size());
    std::vector<char> tracked;
    for (const auto& [f, b] : boxes) tracked.push_back(covered[id].contains(f));
    const double ratio = static_cast<double>(covered[id].size()) / static_cast<double>(boxes.size());
    if (ratio >= 0.8) ++out.mt;
    if (ratio <= 0.2) ++out.ml;
    // Count untracked runs that sit between two tracked frames.
    const auto first = std::find(tracked.begin(), tracked.end(), 1);
    const auto last_it = std::find(tracked.rbegin(), tracked.rend(), 1);
    if (first == tracked.end()) continue;
    const auto end = last_it.base();
    for (auto it = first; it + 1 < end; ++it) {
      if (*it && !*(it + 1)) ++out.fm;
    }
  }
  out.mota = 1.0 - static_cast<double>(out.fn + out.fp + out.idsw) / static_cast<double>(out.gt);
  return out;
}

/// IDF1 by trying every injective gt-id -> result-id map.
inline double idf1(const Trajectories& gt, const Trajectories& res, double thr = 0.5) {
  std::vector<int> gids, rids;
  double ngt = 0.0, nres = 0.0;
  for (const auto& [id, b] : gt) {
    gids.push_back(id);
    ngt += static_cast<double>(b.size());
  }
  for (const auto& [id, b] : res) {
    rids.push_back(id);
    nres += static_cast<double>(b.size());
  }
  auto overlap = [&](int g, int r) {
    double n = 0;
    for (const auto& [f, b] : gt.at(g)) {
      const auto& rb = res.at(r);
      const auto it = rb.find(f);
      if (it != rb.end() && box_iou(b, it->second) >= thr) n += 1;
    }
    return n;
  };
  double best = 0.0;
  for_each_matching(static_cast<int>(gids.size()), static_cast<int>(rids.size()), [&](const std::vector<int>& p) {
    double s = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) {
      if (p[a] >= 0) s += overlap(gids[a], rids[static_cast<std::size_t>(p[a])]);
    }
    best = std::max(best, s);
  });
  return 2.0 * best / (ngt + nres);
}

struct HotaResult {
  double hota = 0.0, deta = 0.0, assa = 0.0;
};

/// HOTA with the per-frame matching found by enumerating every matching and
/// keeping the one with the largest sum of alignment-weighted IoU.
inline HotaResult hota(const Trajectories& gt, const Trajectories& res) {
  const auto frames = frames_of(gt, res);
  std::map<std::pair<int, int>, double> potential;
  std::map<int, double> gcount, rcount;
  for (const auto& [f, fr] : frames) {
    for (const auto& [g, gb] : fr.gt) {
      for (const auto& [r, rb] : fr.res) {
        double rows = 0.0, cols = 0.0;
        for (const auto& [r2, rb2] : fr.res) rows += box_iou(gb, rb2);
        for (const auto& [g2, gb2] : fr.gt) cols += box_iou(gb2, rb);
        const double s = box_iou(gb, rb);
        if (rows + cols - s > 1e-12) potential[{g, r}] += s / (rows + cols - s);
      }
    }
    for (const auto& [g, gb] : fr.gt) gcount[g] += 1;
    for (const auto& [r, rb] : fr.res) rcount[r] += 1;
  }
  auto align = [&](int g, int r) {
    const double p = potential.contains({g, r}) ? potential.at({g, r}) : 0.0;
    return p / (gcount[g] + rcount[r] - p);
  };

  struct Pair {
    int g, r;
    double sim;
  };
  std::vector<std::vector<Pair>> per_frame;
  std::vector<std::pair<double, double>> sizes;  // gt count, res count
  for (const auto& [f, fr] : frames) {
    double best = -1.0;
    std::vector<Pair> chosen;
    for_each_matching(static_cast<int>(fr.gt.size()), static_cast<int>(fr.res.size()), [&](const std::vector<int>& p) {
      double s = 0.0;
      std::vector<Pair> pairs;
      for (std::size_t a = 0; a < p.size(); ++a) {
        if (p[a] < 0) continue;
        const auto& [g, gb] = fr.gt[a];
        const auto& [r, rb] = fr.res[static_cast<std::size_t>(p[a])];
        const double sim = box_iou(gb, rb);
        if (sim <= 0.0) return;
        s += align(g, r) * sim;
        pairs.push_back({g, r, sim});
      }
      if (s > best) {
        best = s;
        chosen = pairs;
      }
    });
    per_frame.push_back(chosen);
    sizes.emplace_back(static_cast<double>(fr.gt.size()), static_cast<double>(fr.res.size()));
  }

  HotaResult out;
  for (int k = 1; k <= 19; ++k) {
    const double alpha = 0.05 * k;
    double tp = 0, fn = 0, fp = 0;
    std::map<std::pair<int, int>, double> mc;
    for (std::size_t f = 0; f < per_frame.size(); ++f) {
      double n = 0;
      for (const auto& p : per_frame[f]) {
        if (p.sim >= alpha - 1e-12) {
          n += 1;
          mc[{p.g, p.r}] += 1;
        }
      }
      tp += n;
      fn += sizes[f].first - n;
      fp += sizes[f].second - n;
    }
    double ass = 0.0;
    for (const auto& [gr, c] : mc) ass += c * c / std::max(1.0, gcount[gr.first] + rcount[gr.second] - c);
    const double assa = ass / std::max(1.0, tp);
    const double deta = tp / std::max(1.0, tp + fn + fp);
    out.hota += std::sqrt(assa * deta) / 19.0;
    out.deta += deta / 19.0;
    out.assa += assa / 19.0;
  }
  return out;
}

}  // namespace oracle
