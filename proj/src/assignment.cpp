#include "meshsort/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace meshsort {
namespace {

// Shortest augmenting path Hungarian for rows <= cols (1-based potentials).
std::vector<int> hungarian_rect(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  }
  return row_to_col;
}

}  // namespace

std::vector<int> solve_partial_assignment(
    const Eigen::MatrixXd& cost, const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& allowed) {
  const Eigen::Index rows = cost.rows();
  const Eigen::Index cols = cost.cols();
  if (allowed.rows() != rows || allowed.cols() != cols) {
    throw std::invalid_argument("cost and mask shapes differ");
  }
  std::vector<int> result(static_cast<std::size_t>(rows), -1);
  if (rows == 0 || cols == 0) return result;

  // Any strictly positive value keeps forbidden cells out of the optimum,
  // since the zero-cost slack column is always available instead.
  constexpr double kForbidden = 1.0;
  Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(rows, cols + rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (allowed(r, c)) {
        if (!std::isfinite(cost(r, c))) throw std::invalid_argument("non-finite cost entry");
        padded(r, c) = cost(r, c);
      } else {
        padded(r, c) = kForbidden;
      }
    }
  }

  const auto raw = hungarian_rect(padded);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const int c = raw[static_cast<std::size_t>(r)];
    if (c >= 0 && c < cols && allowed(r, c) && cost(r, c) <= 0.0) {
      result[static_cast<std::size_t>(r)] = c;
    }
  }
  return result;
}

AssignmentResult make_result(const std::vector<int>& row_to_col, Eigen::Index cols) {
  AssignmentResult out;
  std::vector<char> col_used(static_cast<std::size_t>(cols), 0);
  for (std::size_t r = 0; r < row_to_col.size(); ++r) {
    const int c = row_to_col[r];
    if (c >= 0) {
      out.matches.emplace_back(static_cast<int>(r), c);
      col_used[static_cast<std::size_t>(c)] = 1;
    } else {
      out.unmatched_rows.push_back(static_cast<int>(r));
    }
  }
  for (Eigen::Index c = 0; c < cols; ++c) {
    if (!col_used[static_cast<std::size_t>(c)]) out.unmatched_cols.push_back(static_cast<int>(c));
  }
  return out;
}

AssignmentResult assign(const CostMatrix& c) {
  if (!c.entries.allFinite()) throw std::invalid_argument("cost matrix has non-finite entries");
  const Eigen::MatrixXd shifted = c.entries.array() - c.gate;
  const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> allowed =
      (c.entries.array() <= c.gate).matrix();
  return make_result(solve_partial_assignment(shifted, allowed), c.cols());
}

AssignmentResult assign_max_cardinality(const Eigen::MatrixXd& cost, double gate) {
  if (!cost.allFinite()) throw std::invalid_argument("cost matrix has non-finite entries");
  const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> allowed = (cost.array() <= gate).matrix();
  if (!allowed.any()) return make_result(std::vector<int>(static_cast<std::size_t>(cost.rows()), -1), cost.cols());

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index r = 0; r < cost.rows(); ++r) {
    for (Eigen::Index c = 0; c < cost.cols(); ++c) {
      if (!allowed(r, c)) continue;
      lo = std::min(lo, cost(r, c));
      hi = std::max(hi, cost(r, c));
    }
  }
  // One extra match must outweigh any possible spread in total cost.
  const double k = static_cast<double>(std::min(cost.rows(), cost.cols()));
  const double bonus = (hi - lo + 1.0) * (k + 1.0);
  const Eigen::MatrixXd shifted = cost.array() - hi - bonus;
  return make_result(solve_partial_assignment(shifted, allowed), cost.cols());
}

double gated_objective(const CostMatrix& c, const AssignmentResult& r) {
  double total = 0.0;
  for (const auto& [row, col] : r.matches) total += c.entries(row, col) - c.gate;
  return total;
}

}  // namespace meshsort
