#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace meshsort {

/// Rows are tracks, columns are detections, entries are 1 - overlap.
/// Entries strictly above `gate` are forbidden.
struct CostMatrix {
  Eigen::MatrixXd entries;
  double gate = 1.0;

  Eigen::Index rows() const { return entries.rows(); }
  Eigen::Index cols() const { return entries.cols(); }
};

struct AssignmentResult {
  std::vector<std::pair<int, int>> matches;  ///< (row, col), ascending by row
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
};

/// Minimum-cost partial matching. Each row may stay unmatched at zero cost;
/// entries with `allowed(r, c) == false` are never used. Returns, per row,
/// the matched column or -1. Runs the shortest-augmenting-path Hungarian
/// method on the matrix padded with one zero-cost slack column per row.
std::vector<int> solve_partial_assignment(const Eigen::MatrixXd& cost,
                                          const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& allowed);

/// Gated linear assignment. Minimises sum(c - gate) over matched pairs, i.e.
/// every row and column left unmatched is charged gate / 2, so a pair is
/// matched only when that lowers the total. Pairs above the gate never match.
AssignmentResult assign(const CostMatrix& c);

/// Maximum-cardinality matching among entries <= gate, with minimum total
/// cost among those (the CLEAR-MOT convention).
AssignmentResult assign_max_cardinality(const Eigen::MatrixXd& cost, double gate);

/// Objective minimised by `assign`: sum over matches of (cost - gate).
double gated_objective(const CostMatrix& c, const AssignmentResult& r);

/// Builds the result triple from a row -> column vector.
AssignmentResult make_result(const std::vector<int>& row_to_col, Eigen::Index cols);

}  // namespace meshsort
