#include <gtest/gtest.h>

#include <cmath>

#include "systems.hpp"

using namespace hifs;
using namespace hifs::testing;

namespace {

HIFS scaling(double lip) { return HIFS::from({right_affine({{real(lip)}}, {real(0.1)})}); }

PointSet origin_h1() { return PointSet(H, 1, {0, 0, 0, 0}); }

}  // namespace

TEST(Schedule, BlockLookupFollowsTheTenLevelPattern) {
  const Schedule s = trajectory_schedule();
  EXPECT_EQ(s.period(), 10u);
  for (std::size_t l = 1; l <= 200; ++l) {
    bool first = false;
    for (std::size_t j = 1; 10 * (j - 1) < l; ++j)
      if (l <= 10 * j - 5) first = true;
    EXPECT_EQ(s.family_index(l), first ? 0u : 1u) << "level " << l;
  }
  EXPECT_THROW(s.family_index(0), precondition_violation);
}

TEST(Schedule, StationaryAlwaysReturnsTheFamily) {
  const Schedule s = Schedule::stationary("F", gasket());
  EXPECT_TRUE(s.is_stationary());
  for (std::size_t l : {1u, 2u, 1000u}) EXPECT_EQ(s.family_index(l), 0u);
  EXPECT_EQ(s.referenced().size(), 1u);
}

TEST(Schedule, RejectsMixedShapes) {
  EXPECT_THROW(Schedule::block_periodic({"A", "B"}, {gasket(), quaternion_system()}, {{0, 1}, {1, 1}}), error);
  EXPECT_THROW(Schedule::block_periodic({"A"}, {gasket()}, {}), precondition_violation);
  EXPECT_THROW(Schedule::block_periodic({"A"}, {gasket()}, {{0, 0}}), precondition_violation);
}

TEST(Summability, HalfContractionSumsToOne) {
  const auto rep = summability_report(Schedule::stationary("F", scaling(0.5)), 20);
  EXPECT_EQ(rep.verdict, Verdict::convergent);
  EXPECT_NEAR(rep.total_bound(), 1.0, 1e-12);
  EXPECT_NEAR(rep.product(3), 0.125, 1e-15);
  EXPECT_EQ(rep.product(0), 1.0);
}

TEST(Summability, NonContractiveStationaryDiverges) {
  const auto rep = summability_report(Schedule::stationary("F", scaling(1.0)), 10);
  EXPECT_EQ(rep.verdict, Verdict::divergent);
  EXPECT_FALSE(rep.geometric_tail);
  EXPECT_EQ(rep.total_bound(), INFINITY);
}

TEST(Summability, ExpandingBlockIsInconclusive) {
  const Schedule s = Schedule::block_periodic({"A", "B"}, {scaling(1.2), scaling(0.5)}, {{0, 1}, {1, 1}});
  const auto rep = summability_report(s, 10);
  EXPECT_NEAR(rep.period_product, 0.6, 1e-12);
  EXPECT_EQ(rep.verdict, Verdict::inconclusive);
}

TEST(Summability, QuaternionTrajectoryConverges) {
  const auto rep = summability_report(trajectory_schedule(), 30);
  EXPECT_EQ(rep.verdict, Verdict::convergent);
  EXPECT_NEAR(rep.period_product, std::pow(0.75, 5) * std::pow(0.7, 5), 1e-9);
  EXPECT_NEAR(rep.period_product, 0.0399, 5e-5);
  // tail by brute force over many more periods
  double brute = 0, p = 1;
  const Schedule s = trajectory_schedule();
  for (std::size_t l = 1; l <= 2000; ++l) brute += (p *= s.lookup(l).h());
  EXPECT_NEAR(rep.total_bound(), brute, 1e-9);
}

TEST(Summability, TailIsExactForAnyHorizon) {
  const Schedule s = trajectory_schedule();
  const double total = summability_report(s, 1).total_bound();
  for (std::size_t h : {2u, 7u, 13u, 40u}) EXPECT_NEAR(summability_report(s, h).total_bound(), total, 1e-12);
}

TEST(BackwardSets, DepthZeroReturnsInitialSet) {
  const PointSet f0(H, 1, {0.5, 0, 0, 0, 0, 0.5, 0, 0});
  const auto res = backward_attractor_sets(trajectory_schedule(), f0, 0, 0.01);
  EXPECT_EQ(max_abs_diff(res.set.coords(), f0.coords()), 0.0);
  EXPECT_NEAR(res.tail_bound, 2 * 7.0, 1e-9);
}

TEST(BackwardSets, BoundedByInvariantBall) {
  const auto res = backward_attractor_sets(trajectory_schedule(), origin_h1(), 30, 0.02);
  EXPECT_NEAR(res.ball.r, 7.0, 1e-9);
  for (double n : res.max_norms) EXPECT_LE(n, 1.01 * 7.0);
}

TEST(BackwardSets, CauchyAcrossDepths) {
  const Schedule s = trajectory_schedule();
  const double cell = 0.02;
  for (std::size_t l : {10u, 20u, 30u}) {
    const auto a = backward_attractor_sets(s, origin_h1(), l, cell);
    const auto b = backward_attractor_sets(s, origin_h1(), l + 10, cell);
    EXPECT_LE(hausdorff(a.set, b.set), a.tail_bound + b.tail_bound) << "level " << l;
    EXPECT_LT(b.tail_bound, a.tail_bound);
  }
}

TEST(BackwardSets, StationaryScheduleMatchesHutchinsonIteration) {
  const HIFS ifs = gasket();
  const double cell = 0.01;
  PointSet direct(R, 2, {0, 0});
  for (int i = 0; i < 12; ++i) direct = hutchinson(ifs, direct, cell);
  const auto res = backward_attractor_sets(Schedule::stationary("F", ifs), PointSet(R, 2, {0, 0}), 12, cell);
  ASSERT_EQ(res.set.size(), direct.size());
  EXPECT_EQ(max_abs_diff(res.set.coords(), direct.coords()), 0.0);
}

TEST(BackwardSets, BlockOrderMatters) {
  const HIFS f1 = HIFS::from(trajectory_family1()), f2 = HIFS::from(trajectory_family2());
  const Schedule ab = Schedule::block_periodic({"F1", "F2"}, {f1, f2}, {{0, 5}, {1, 5}});
  const Schedule ba = Schedule::block_periodic({"F1", "F2"}, {f1, f2}, {{1, 5}, {0, 5}});
  const auto x = backward_attractor_sets(ab, origin_h1(), 30, 0.02);
  const auto y = backward_attractor_sets(ba, origin_h1(), 30, 0.02);
  EXPECT_GT(hausdorff(x.set, y.set), x.tail_bound + y.tail_bound);
}

TEST(BackwardSets, Preconditions) {
  EXPECT_THROW(backward_attractor_sets(Schedule::stationary("F", scaling(1.0)), PointSet(R, 1, {0.0}), 5, 0.1),
               precondition_violation);
  EXPECT_THROW(backward_attractor_sets(trajectory_schedule(), PointSet(H, 1, {8, 0, 0, 0}), 5, 0.1),
               precondition_violation);
  EXPECT_THROW(backward_attractor_sets(trajectory_schedule(), PointSet(H, 1), 5, 0.1), empty_set);
}

TEST(BackwardPoints, LieOnTheDecimatedBackwardSet) {
  const Schedule s = trajectory_schedule();
  const double cell = 0.005;
  const std::size_t depth = 15;
  const auto sets = backward_attractor_sets(s, origin_h1(), depth, cell);
  const PointSet pts = backward_attractor_points(s, depth, 2000, 11);
  const PointSet grid = sets.set.with_grid(0.05);
  for (std::size_t i = 0; i < pts.size(); ++i)
    ASSERT_LE(std::sqrt(nearest_sq(grid, pts.point(i))), sets.slack + 1e-12);
}

TEST(BackwardPoints, Deterministic) {
  const Schedule s = trajectory_schedule();
  const PointSet a = backward_attractor_points(s, 25, 3000, 9, 1);
  const PointSet b = backward_attractor_points(s, 25, 3000, 9, 3);
  EXPECT_EQ(max_abs_diff(a.coords(), b.coords()), 0.0);
  EXPECT_THROW(backward_attractor_points(Schedule::stationary("F", scaling(1.0)), 5, 10, 1), precondition_violation);
}

TEST(DepthForTolerance, SmallestSufficientDepth) {
  const Schedule s = Schedule::stationary("F", scaling(0.5));
  EXPECT_EQ(depth_for_tolerance(s, 4.0, 0.5), 3u);
  EXPECT_EQ(depth_for_tolerance(s, 0.1, 0.5), 0u);
  EXPECT_THROW(depth_for_tolerance(Schedule::stationary("F", scaling(1.0)), 1.0, 0.5, 50), convergence_failure);
}
