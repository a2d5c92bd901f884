#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "systems.hpp"

using namespace hifs;
using namespace hifs::testing;

TEST(Adjoint, SingleEntryIsConjugated) {
  HMatrix h(H, 1);
  h.set(0, 0, Paravector::basis(H, 1));
  EXPECT_EQ(adjoint(h).at(0, 0), Paravector::basis(H, 1, -1.0));
}

TEST(Adjoint, TransposesAndConjugates) {
  HMatrix h(H, 2);
  h.set(0, 1, example_q());
  const HMatrix a = adjoint(h);
  EXPECT_EQ(a.at(1, 0), conj(example_q()));
  EXPECT_EQ(a.at(0, 1), Paravector(H));
  EXPECT_EQ(a.at(0, 0), Paravector(H));
  EXPECT_EQ(a.at(1, 1), Paravector(H));
}

TEST(Adjoint, IsAnInvolution) {
  std::mt19937_64 rng(11);
  for (AlgebraKind alg : {H, AlgebraKind::clifford(4)}) {
    HMatrix h(alg, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) h.set(i, j, random_paravector(rng, alg));
    EXPECT_EQ(adjoint(adjoint(h)), h);
  }
}

TEST(HNorm, Examples) {
  const Paravector one = Paravector::scalar(H, 1);
  EXPECT_NEAR(hnorm(HVector({one - example_q(), Paravector(H)})), std::sqrt(0.7), 1e-12);
  EXPECT_EQ(hnorm(HVector(H, 2)), 0.0);
  EXPECT_NEAR(hnorm(HVector({all_ones() - 0.75 * one, Paravector(H)})), 1.75, 1e-12);
}

TEST(HNorm, SquaredNormIsScalarPartOfAdjointProduct) {
  std::mt19937_64 rng(12);
  for (AlgebraKind alg : {H, AlgebraKind::clifford(3), AlgebraKind::clifford(5)}) {
    for (int trial = 0; trial < 50; ++trial) {
      const HVector xi = random_hvector(rng, alg, 3);
      const CliffordNumber prod = adjoint_product(xi, xi);
      EXPECT_NEAR(prod[0], hnorm(xi) * hnorm(xi), 1e-12);
    }
  }
}

TEST(HVector, FlatAndEntryViewsAgree) {
  std::mt19937_64 rng(13);
  const HVector xi = random_hvector(rng, H, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(xi.entry(i)[j], xi[i * 4 + j]);
  std::vector<Paravector> entries{xi.entry(0), xi.entry(1), xi.entry(2)};
  EXPECT_EQ(HVector(entries), xi);
}

TEST(Metric, Basics) {
  std::mt19937_64 rng(14);
  const HVector xi = random_hvector(rng, H, 2);
  EXPECT_EQ(metric(xi, xi), 0.0);
  HVector e0(H, 2);
  e0[0] = 1;
  EXPECT_EQ(metric(HVector(H, 2), e0), 1.0);
  EXPECT_THROW(metric(HVector(H, 2), HVector(H, 3)), shape_mismatch);
  EXPECT_THROW(metric(HVector(H, 1), HVector(R, 4)), algebra_mismatch);
}

TEST(Metric, SymmetricAndTriangle) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_hvector(rng, H, 2), b = random_hvector(rng, H, 2), c = random_hvector(rng, H, 2);
    EXPECT_EQ(metric(a, b), metric(b, a));
    EXPECT_LE(metric(a, c), metric(a, b) + metric(b, c) + 1e-12);
  }
}

namespace {

PointSet reals(std::vector<double> xs) { return PointSet(R, 1, std::move(xs)); }

}  // namespace

TEST(HausdorffBruteforce, Examples) {
  const PointSet a = reals({0, 2}), b = reals({1});
  EXPECT_EQ(hausdorff_bruteforce(a, a), 0.0);
  EXPECT_EQ(hausdorff_bruteforce(a, b), 1.0);
  EXPECT_EQ(hausdorff_bruteforce(reals({0}), reals({1})), 1.0);
  EXPECT_THROW(hausdorff_bruteforce(reals({}), b), empty_set);
}

TEST(HausdorffBruteforce, MetricProperties) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_cloud(rng, H, 1, 20), b = random_cloud(rng, H, 1, 15), c = random_cloud(rng, H, 1, 25);
    EXPECT_NEAR(hausdorff_bruteforce(a, b), hausdorff_bruteforce(b, a), 1e-12);
    EXPECT_LE(hausdorff_bruteforce(a, c), hausdorff_bruteforce(a, b) + hausdorff_bruteforce(b, c) + 1e-12);
    EXPECT_EQ(hausdorff_bruteforce(a, a.sorted()), 0.0);
    EXPECT_GT(hausdorff_bruteforce(a, b), 0.0);
  }
}

TEST(HausdorffGrid, AgreesWithBruteForce) {
  std::mt19937_64 rng(17);
  const AlgebraKind c1 = AlgebraKind::clifford(1);
  for (int trial = 0; trial < 40; ++trial) {
    const bool planar = trial % 2 == 0;
    const std::size_t na = 1 + rng() % 300, nb = 1 + rng() % 300;
    const auto a = planar ? random_cloud(rng, c1, 1, na) : random_cloud(rng, H, 2, na);
    const auto b = planar ? random_cloud(rng, c1, 1, nb, 1.5) : random_cloud(rng, H, 2, nb, 0.5);
    const double cell = 0.05 + 0.5 * uniform(rng, 0, 1);
    EXPECT_NEAR(hausdorff_grid(a.with_grid(cell), b.with_grid(cell)), hausdorff_bruteforce(a, b), 1e-12);
  }
}

TEST(HausdorffGrid, TrivialCases) {
  std::mt19937_64 rng(18);
  const auto a = random_cloud(rng, H, 2, 100).with_grid(0.3);
  EXPECT_EQ(hausdorff_grid(a, a), 0.0);
  const HVector x = random_hvector(rng, H, 2), y = random_hvector(rng, H, 2);
  EXPECT_NEAR(hausdorff_grid(PointSet::singleton(x).with_grid(0.1), PointSet::singleton(y).with_grid(0.1)),
              metric(x, y), 1e-12);
}

TEST(HausdorffGrid, RequiresMatchingGrids) {
  const PointSet a = reals({0, 1});
  EXPECT_THROW(hausdorff_grid(a, a.with_grid(0.5)), precondition_violation);
  EXPECT_THROW(hausdorff_grid(a.with_grid(0.1), a.with_grid(0.5)), precondition_violation);
  EXPECT_THROW(hausdorff_grid(reals({}).with_grid(0.1), a.with_grid(0.1)), empty_set);
}

TEST(HausdorffGrid, ParallelMatchesSequential) {
  std::mt19937_64 rng(19);
  const auto a = random_cloud(rng, H, 1, 400).with_grid(0.25), b = random_cloud(rng, H, 1, 300).with_grid(0.25);
  EXPECT_EQ(hausdorff_grid(a, b, 1), hausdorff_grid(a, b, 4));
}

TEST(Grid, IndexesExactlyTheMembers) {
  std::mt19937_64 rng(20);
  const auto a = random_cloud(rng, H, 1, 250).with_grid(0.2);
  EXPECT_EQ(a.grid()->member_count(), a.size());
  std::vector<int> seen(a.size(), 0);
  for (const auto& c : a.grid()->cells())
    for (auto m : c.members) {
      ++seen[m];
      CellKey key;
      cell_of(a.point(m), 0.2, key);
      EXPECT_EQ(key, c.key);
    }
  for (int s : seen) EXPECT_EQ(s, 1);
}

TEST(Decimate, SingletonMovesToCellCenter) {
  const PointSet s(AlgebraKind::clifford(1), 1, {0.03, 0.18});
  const PointSet d = decimate(s, 0.1);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NEAR(d.point(0)[0], 0.05, 1e-15);
  EXPECT_NEAR(d.point(0)[1], 0.15, 1e-15);
  EXPECT_LE(hausdorff_bruteforce(s, d), decimation_slack(0.1, 2));
}

TEST(Decimate, SameCellCollapses) {
  EXPECT_EQ(decimate(reals({0.01, 0.02}), 0.1).size(), 1u);
}

TEST(Decimate, DisplacementBoundAndIdempotence) {
  std::mt19937_64 rng(21);
  const AlgebraKind c1 = AlgebraKind::clifford(1);
  for (double cell : {0.1, 0.03, 0.4}) {
    const auto a = random_cloud(rng, c1, 1, 500);
    const auto d = decimate(a, cell);
    EXPECT_LE(hausdorff_bruteforce(a, d), cell * std::sqrt(2.0) / 2);
    EXPECT_EQ(decimate(d, cell).coords().size(), d.coords().size());
    EXPECT_EQ(max_abs_diff(decimate(d, cell).coords(), d.coords()), 0.0);
  }
  const auto a8 = random_cloud(rng, H, 2, 300);
  EXPECT_LE(hausdorff_bruteforce(a8, decimate(a8, 0.2)), decimation_slack(0.2, 8));
}

TEST(Decimate, IndependentOfInputOrder) {
  std::mt19937_64 rng(22);
  const auto a = random_cloud(rng, H, 1, 200);
  const auto d1 = decimate(a, 0.3), d2 = decimate(a.sorted(), 0.3);
  ASSERT_EQ(d1.size(), d2.size());
  EXPECT_EQ(max_abs_diff(d1.coords(), d2.coords()), 0.0);
}
