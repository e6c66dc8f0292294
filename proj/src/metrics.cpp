#include "meshsort/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "meshsort/assignment.hpp"
#include "meshsort/errors.hpp"

namespace meshsort {
namespace {

using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct FrameView {
  std::vector<IdBox> gt;
  std::vector<IdBox> res;
};

std::map<std::int64_t, FrameView> by_frame(const Trajectories& gt, const Trajectories& res) {
  std::map<std::int64_t, FrameView> frames;
  for (const auto& [id, boxes] : gt) {
    for (const auto& [f, b] : boxes) frames[f].gt.push_back({id, b});
  }
  for (const auto& [id, boxes] : res) {
    for (const auto& [f, b] : boxes) frames[f].res.push_back({id, b});
  }
  return frames;
}

void require_gt(const Trajectories& gt) {
  std::size_t n = 0;
  for (const auto& [id, boxes] : gt) n += boxes.size();
  if (n == 0) throw MetricError("metrics are undefined for empty ground truth");
}

Eigen::MatrixXd iou_matrix(std::span<const IdBox> gt, std::span<const IdBox> res) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(gt.size()), static_cast<Eigen::Index>(res.size()));
  for (std::size_t g = 0; g < gt.size(); ++g) {
    for (std::size_t r = 0; r < res.size(); ++r) {
      m(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(r)) = iou(gt[g].box, res[r].box);
    }
  }
  return m;
}

}  // namespace

Trajectories trajectories_from_outputs(std::span<const FrameOutput> outputs) {
  Trajectories t;
  for (const auto& fo : outputs) {
    for (const auto& o : fo.tracks) t[o.id][fo.frame] = o.box;
  }
  return t;
}

FrameCorrespondence match_frame(std::span<const IdBox> gt, std::span<const IdBox> res,
                                double iou_thr, std::map<int, int>& last_match) {
  FrameCorrespondence out;
  const Eigen::MatrixXd sim = iou_matrix(gt, res);
  std::vector<char> gt_used(gt.size(), 0);
  std::vector<char> res_used(res.size(), 0);

  for (std::size_t g = 0; g < gt.size(); ++g) {
    const auto it = last_match.find(gt[g].id);
    if (it == last_match.end()) continue;
    for (std::size_t r = 0; r < res.size(); ++r) {
      if (res_used[r] || res[r].id != it->second) continue;
      if (sim(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(r)) >= iou_thr) {
        gt_used[g] = res_used[r] = 1;
        out.matches.emplace_back(gt[g].id, res[r].id);
      }
      break;
    }
  }

  std::vector<std::size_t> free_gt, free_res;
  for (std::size_t g = 0; g < gt.size(); ++g) {
    if (!gt_used[g]) free_gt.push_back(g);
  }
  for (std::size_t r = 0; r < res.size(); ++r) {
    if (!res_used[r]) free_res.push_back(r);
  }
  Eigen::MatrixXd cost(static_cast<Eigen::Index>(free_gt.size()),
                       static_cast<Eigen::Index>(free_res.size()));
  for (std::size_t a = 0; a < free_gt.size(); ++a) {
    for (std::size_t b = 0; b < free_res.size(); ++b) {
      cost(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          1.0 - sim(static_cast<Eigen::Index>(free_gt[a]), static_cast<Eigen::Index>(free_res[b]));
    }
  }
  // Fresh pairs need IoU >= iou_thr, i.e. cost <= 1 - iou_thr; evaluate on
  // IoU directly so the boundary is not subject to rounding in 1 - IoU.
  Mask allowed(cost.rows(), cost.cols());
  for (Eigen::Index a = 0; a < cost.rows(); ++a) {
    for (Eigen::Index b = 0; b < cost.cols(); ++b) {
      allowed(a, b) = sim(static_cast<Eigen::Index>(free_gt[static_cast<std::size_t>(a)]),
                          static_cast<Eigen::Index>(free_res[static_cast<std::size_t>(b)])) >= iou_thr;
    }
  }
  if (allowed.any()) {
    const Eigen::MatrixXd masked = allowed.select(cost, Eigen::MatrixXd::Constant(cost.rows(), cost.cols(), 2.0));
    const auto fresh = assign_max_cardinality(masked, 1.0);
    for (const auto& [a, b] : fresh.matches) {
      out.matches.emplace_back(gt[free_gt[static_cast<std::size_t>(a)]].id,
                               res[free_res[static_cast<std::size_t>(b)]].id);
    }
  }

  for (const auto& [g, r] : out.matches) {
    const auto it = last_match.find(g);
    if (it != last_match.end() && it->second != r) ++out.switches;
    last_match[g] = r;
  }
  out.tp = static_cast<int>(out.matches.size());
  out.fn = static_cast<int>(gt.size()) - out.tp;
  out.fp = static_cast<int>(res.size()) - out.tp;
  return out;
}

ClearMot clear_mot(const Trajectories& gt, const Trajectories& res, double iou_thr) {
  require_gt(gt);
  if (!(iou_thr > 0.0 && iou_thr < 1.0)) throw std::invalid_argument("iou_thr must be in (0, 1)");

  ClearMot out;
  std::map<int, int> last_match;
  std::map<int, std::set<std::int64_t>> covered;
  for (const auto& [frame, view] : by_frame(gt, res)) {
    const auto fc = match_frame(view.gt, view.res, iou_thr, last_match);
    out.tp += fc.tp;
    out.fp += fc.fp;
    out.fn += fc.fn;
    out.idsw += fc.switches;
    for (const auto& [g, r] : fc.matches) covered[g].insert(frame);
  }

  for (const auto& [id, boxes] : gt) {
    if (boxes.empty()) continue;
    ++out.gt_tracks;
    out.gt_total += static_cast<std::int64_t>(boxes.size());
    const auto& cov = covered[id];
    const double ratio = static_cast<double>(cov.size()) / static_cast<double>(boxes.size());
    if (ratio >= 0.8) {
      ++out.mt;
    } else if (ratio <= 0.2) {
      ++out.ml;
    } else {
      ++out.pt;
    }
    // Fragmentation: tracked -> untracked transitions that are resumed later.
    bool seen_tracked = false;
    bool in_gap = false;
    for (const auto& [f, b] : boxes) {
      const bool tracked = cov.contains(f);
      if (tracked) {
        if (in_gap) ++out.fm;
        seen_tracked = true;
        in_gap = false;
      } else if (seen_tracked) {
        in_gap = true;
      }
    }
  }
  out.mota = 1.0 - static_cast<double>(out.fn + out.fp + out.idsw) / static_cast<double>(out.gt_total);
  return out;
}

double idf1(const Trajectories& gt, const Trajectories& res, double iou_thr) {
  require_gt(gt);
  std::vector<int> gt_ids, res_ids;
  std::int64_t gt_total = 0, res_total = 0;
  for (const auto& [id, boxes] : gt) {
    gt_ids.push_back(id);
    gt_total += static_cast<std::int64_t>(boxes.size());
  }
  for (const auto& [id, boxes] : res) {
    res_ids.push_back(id);
    res_total += static_cast<std::int64_t>(boxes.size());
  }

  Eigen::MatrixXd overlap = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(gt_ids.size()),
                                                  static_cast<Eigen::Index>(res_ids.size()));
  Eigen::Index gi = 0;
  for (const auto& [gid, gboxes] : gt) {
    Eigen::Index ri = 0;
    for (const auto& [rid, rboxes] : res) {
      double n = 0;
      for (const auto& [f, gb] : gboxes) {
        const auto it = rboxes.find(f);
        if (it != rboxes.end() && iou(gb, it->second) >= iou_thr) n += 1.0;
      }
      overlap(gi, ri) = n;
      ++ri;
    }
    ++gi;
  }

  const Mask allowed = (overlap.array() > 0.0).matrix();
  const auto row_to_col = solve_partial_assignment(-overlap, allowed);
  double idtp = 0.0;
  for (std::size_t r = 0; r < row_to_col.size(); ++r) {
    if (row_to_col[r] >= 0) idtp += overlap(static_cast<Eigen::Index>(r), row_to_col[r]);
  }
  const double idfn = static_cast<double>(gt_total) - idtp;
  const double idfp = static_cast<double>(res_total) - idtp;
  return 2.0 * idtp / (2.0 * idtp + idfp + idfn);
}

std::array<double, Hota::kAlphas> Hota::alphas() {
  std::array<double, kAlphas> a{};
  for (std::size_t i = 0; i < kAlphas; ++i) a[i] = 0.05 * static_cast<double>(i + 1);
  return a;
}

Hota hota(const Trajectories& gt, const Trajectories& res) {
  require_gt(gt);
  constexpr double kEps = 1e-12;
  std::map<int, Eigen::Index> gidx, ridx;
  for (const auto& [id, b] : gt) gidx.emplace(id, static_cast<Eigen::Index>(gidx.size()));
  for (const auto& [id, b] : res) ridx.emplace(id, static_cast<Eigen::Index>(ridx.size()));
  const Eigen::Index ng = static_cast<Eigen::Index>(gidx.size());
  const Eigen::Index nr = static_cast<Eigen::Index>(ridx.size());

  const auto frames = by_frame(gt, res);

  Eigen::MatrixXd potential = Eigen::MatrixXd::Zero(ng, nr);
  Eigen::VectorXd gt_count = Eigen::VectorXd::Zero(ng);
  Eigen::VectorXd res_count = Eigen::VectorXd::Zero(nr);
  for (const auto& [f, view] : frames) {
    const Eigen::MatrixXd sim = iou_matrix(view.gt, view.res);
    const Eigen::VectorXd row_sum = sim.rowwise().sum();
    const Eigen::RowVectorXd col_sum = sim.colwise().sum();
    for (Eigen::Index g = 0; g < sim.rows(); ++g) {
      for (Eigen::Index r = 0; r < sim.cols(); ++r) {
        const double denom = row_sum(g) + col_sum(r) - sim(g, r);
        if (denom > kEps) {
          potential(gidx.at(view.gt[static_cast<std::size_t>(g)].id),
                    ridx.at(view.res[static_cast<std::size_t>(r)].id)) += sim(g, r) / denom;
        }
      }
    }
    for (const auto& x : view.gt) gt_count(gidx.at(x.id)) += 1.0;
    for (const auto& x : view.res) res_count(ridx.at(x.id)) += 1.0;
  }
  Eigen::MatrixXd alignment = Eigen::MatrixXd::Zero(ng, nr);
  for (Eigen::Index g = 0; g < ng; ++g) {
    for (Eigen::Index r = 0; r < nr; ++r) {
      const double denom = gt_count(g) + res_count(r) - potential(g, r);
      if (denom > 0.0) alignment(g, r) = potential(g, r) / denom;
    }
  }

  const auto alphas = Hota::alphas();
  std::array<double, Hota::kAlphas> tp{}, fn{}, fp{};
  std::vector<Eigen::MatrixXd> match_counts(Hota::kAlphas, Eigen::MatrixXd::Zero(ng, nr));

  for (const auto& [f, view] : frames) {
    const Eigen::MatrixXd sim = iou_matrix(view.gt, view.res);
    Eigen::MatrixXd score(sim.rows(), sim.cols());
    for (Eigen::Index g = 0; g < sim.rows(); ++g) {
      for (Eigen::Index r = 0; r < sim.cols(); ++r) {
        score(g, r) = alignment(gidx.at(view.gt[static_cast<std::size_t>(g)].id),
                                ridx.at(view.res[static_cast<std::size_t>(r)].id)) *
                      sim(g, r);
      }
    }
    const Mask allowed = (score.array() > 0.0).matrix();
    const auto row_to_col = solve_partial_assignment(-score, allowed);
    for (std::size_t a = 0; a < Hota::kAlphas; ++a) {
      int n = 0;
      for (std::size_t g = 0; g < row_to_col.size(); ++g) {
        const int r = row_to_col[g];
        if (r < 0 || sim(static_cast<Eigen::Index>(g), r) < alphas[a] - kEps) continue;
        ++n;
        match_counts[a](gidx.at(view.gt[g].id), ridx.at(view.res[static_cast<std::size_t>(r)].id)) += 1.0;
      }
      tp[a] += n;
      fn[a] += static_cast<double>(view.gt.size()) - n;
      fp[a] += static_cast<double>(view.res.size()) - n;
    }
  }

  Hota out;
  for (std::size_t a = 0; a < Hota::kAlphas; ++a) {
    const auto& mc = match_counts[a];
    double ass_sum = 0.0;
    for (Eigen::Index g = 0; g < ng; ++g) {
      for (Eigen::Index r = 0; r < nr; ++r) {
        if (mc(g, r) <= 0.0) continue;
        const double denom = std::max(1.0, gt_count(g) + res_count(r) - mc(g, r));
        ass_sum += mc(g, r) * (mc(g, r) / denom);
      }
    }
    out.assa_alpha[a] = ass_sum / std::max(1.0, tp[a]);
    out.deta_alpha[a] = tp[a] / std::max(1.0, tp[a] + fn[a] + fp[a]);
    out.hota_alpha[a] = std::sqrt(out.deta_alpha[a] * out.assa_alpha[a]);
    out.hota += out.hota_alpha[a];
    out.deta += out.deta_alpha[a];
    out.assa += out.assa_alpha[a];
  }
  const double k = static_cast<double>(Hota::kAlphas);
  out.hota /= k;
  out.deta /= k;
  out.assa /= k;
  return out;
}

MetricsReport evaluate(const Trajectories& gt, const Trajectories& res, double iou_thr) {
  return {clear_mot(gt, res, iou_thr), idf1(gt, res, iou_thr), hota(gt, res)};
}

std::string MetricsReport::table() const {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%7s %7s %7s %7s %7s %7s %7s %7s %5s %5s %5s %5s\n"
                "%7.2f %7.2f %7.2f %7.2f %7.2f %7lld %7lld %7lld %5lld %5lld %5lld %5lld\n",
                "MOTA", "IDF1", "HOTA", "DetA", "AssA", "FP", "FN", "IDSW", "FM", "MT", "ML", "GT",
                100.0 * clear.mota, 100.0 * idf1, 100.0 * hota.hota, 100.0 * hota.deta,
                100.0 * hota.assa, static_cast<long long>(clear.fp), static_cast<long long>(clear.fn),
                static_cast<long long>(clear.idsw), static_cast<long long>(clear.fm),
                static_cast<long long>(clear.mt), static_cast<long long>(clear.ml),
                static_cast<long long>(clear.gt_tracks));
  return buf;
}

std::string MetricsReport::key_values() const {
  std::ostringstream os;
  os.precision(10);
  os << "MOTA=" << clear.mota << '\n'
     << "IDF1=" << idf1 << '\n'
     << "HOTA=" << hota.hota << '\n'
     << "DetA=" << hota.deta << '\n'
     << "AssA=" << hota.assa << '\n'
     << "FP=" << clear.fp << '\n'
     << "FN=" << clear.fn << '\n'
     << "IDSW=" << clear.idsw << '\n'
     << "FM=" << clear.fm << '\n'
     << "MT=" << clear.mt << '\n'
     << "PT=" << clear.pt << '\n'
     << "ML=" << clear.ml << '\n'
     << "GT_TRACKS=" << clear.gt_tracks << '\n'
     << "GT_TOTAL=" << clear.gt_total << '\n';
  return os.str();
}

}  // namespace meshsort
