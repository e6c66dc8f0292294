#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "meshsort/assignment.hpp"
#include "meshsort/rng.hpp"
#include "oracles.hpp"

using namespace meshsort;

namespace {

Eigen::MatrixXd random_costs(Rng& rng, int rows, int cols) {
  Eigen::MatrixXd c(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int k = 0; k < cols; ++k) c(r, k) = rng.uniform();
  }
  return c;
}

void check_partition(const AssignmentResult& res, Eigen::Index rows, Eigen::Index cols) {
  std::set<int> r, c;
  for (const auto& [a, b] : res.matches) {
    REQUIRE(r.insert(a).second);
    REQUIRE(c.insert(b).second);
  }
  for (int a : res.unmatched_rows) REQUIRE(r.insert(a).second);
  for (int b : res.unmatched_cols) REQUIRE(c.insert(b).second);
  REQUIRE(static_cast<Eigen::Index>(r.size()) == rows);
  REQUIRE(static_cast<Eigen::Index>(c.size()) == cols);
}

}  // namespace

TEST_CASE("assign examples") {
  CostMatrix c{Eigen::MatrixXd(2, 2), 0.8};
  c.entries << 0.1, 0.9, 0.9, 0.1;
  const AssignmentResult r = assign(c);
  CHECK(r.matches == std::vector<std::pair<int, int>>{{0, 0}, {1, 1}});
  CHECK(r.unmatched_rows.empty());

  CostMatrix one{Eigen::MatrixXd::Constant(1, 1, 0.2), 0.8};
  CHECK(assign(one).matches == std::vector<std::pair<int, int>>{{0, 0}});

  CostMatrix gated{Eigen::MatrixXd::Constant(2, 3, 0.95), 0.8};
  const AssignmentResult g = assign(gated);
  CHECK(g.matches.empty());
  CHECK(g.unmatched_rows == std::vector<int>{0, 1});
  CHECK(g.unmatched_cols == std::vector<int>{0, 1, 2});

  const AssignmentResult e = assign(CostMatrix{Eigen::MatrixXd(0, 3), 0.8});
  CHECK(e.matches.empty());
  CHECK(e.unmatched_cols.size() == 3);
  CHECK(assign(CostMatrix{Eigen::MatrixXd(2, 0), 0.8}).unmatched_rows.size() == 2);
}

TEST_CASE("entry exactly at the gate may match") {
  CostMatrix c{Eigen::MatrixXd::Constant(1, 1, 0.8), 0.8};
  const AssignmentResult r = assign(c);
  CHECK(gated_objective(c, r) == 0.0);
  CostMatrix above{Eigen::MatrixXd::Constant(1, 1, 0.8000001), 0.8};
  CHECK(assign(above).matches.empty());
}

TEST_CASE("max cardinality prefers more matches over lower cost") {
  Eigen::MatrixXd c(2, 2);
  c << 0.0, 0.4, 0.4, 1.0;
  const AssignmentResult r = assign_max_cardinality(c, 0.5);
  CHECK(r.matches == std::vector<std::pair<int, int>>{{0, 1}, {1, 0}});
  CostMatrix g{c, 0.5};
  CHECK(assign(g).matches == std::vector<std::pair<int, int>>{{0, 0}});
}

TEST_CASE("property: assign matches exhaustive search") {
  Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const int rows = static_cast<int>(rng.uniform() * 8);
    const int cols = static_cast<int>(rng.uniform() * 8);
    CostMatrix c{random_costs(rng, rows, cols), 0.2 + 0.8 * rng.uniform()};
    const AssignmentResult r = assign(c);
    check_partition(r, rows, cols);
    for (const auto& [a, b] : r.matches) REQUIRE(c.entries(a, b) <= c.gate);
    REQUIRE(gated_objective(c, r) == doctest::Approx(oracle::gated_min(c.entries, c.gate)).epsilon(1e-12));

    const AssignmentResult mc = assign_max_cardinality(c.entries, c.gate);
    check_partition(mc, rows, cols);
    const auto [n, cost] = oracle::max_cardinality_min(c.entries, c.gate);
    REQUIRE(static_cast<int>(mc.matches.size()) == n);
    double total = 0.0;
    for (const auto& [a, b] : mc.matches) total += c.entries(a, b);
    REQUIRE(total == doctest::Approx(cost).epsilon(1e-12));
  }
}

TEST_CASE("property: total cost is invariant under row and column permutations") {
  Rng rng(22);
  for (int trial = 0; trial < 300; ++trial) {
    const int rows = 1 + static_cast<int>(rng.uniform() * 9);
    const int cols = 1 + static_cast<int>(rng.uniform() * 9);
    CostMatrix c{random_costs(rng, rows, cols), 0.7};
    std::vector<int> pr(static_cast<std::size_t>(rows)), pc(static_cast<std::size_t>(cols));
    std::iota(pr.begin(), pr.end(), 0);
    std::iota(pc.begin(), pc.end(), 0);
    for (std::size_t k = pr.size(); k > 1; --k) std::swap(pr[k - 1], pr[static_cast<std::size_t>(rng.uniform() * k)]);
    for (std::size_t k = pc.size(); k > 1; --k) std::swap(pc[k - 1], pc[static_cast<std::size_t>(rng.uniform() * k)]);
    CostMatrix p{Eigen::MatrixXd(rows, cols), c.gate};
    for (int r = 0; r < rows; ++r) {
      for (int k = 0; k < cols; ++k) p.entries(r, k) = c.entries(pr[static_cast<std::size_t>(r)], pc[static_cast<std::size_t>(k)]);
    }
    REQUIRE(gated_objective(p, assign(p)) == doctest::Approx(gated_objective(c, assign(c))).epsilon(1e-12));
  }
}

TEST_CASE("solve_partial_assignment respects the allowed mask") {
  Eigen::MatrixXd c(2, 2);
  c << -10, -4, -4, -1;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> allowed(2, 2);
  allowed << false, true, true, true;
  const std::vector<int> r = solve_partial_assignment(c, allowed);
  CHECK(r[0] == 1);
  CHECK(r[1] == 0);
}
