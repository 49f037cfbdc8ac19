#include "test_util.hpp"

namespace cloudcast {
namespace {

using testing::random_permutation;

// Exhaustive oracle: sort every other point by (distance, index) and keep the first K-1.
NeighborTable brute_force_knn(const PointCloudFrame& f, std::size_t k) {
  NeighborTable t(f.channels(), f.points(), k);
  for (std::size_t u = 0; u < f.channels(); ++u)
    for (std::size_t n = 0; n < f.points(); ++n) {
      std::vector<std::pair<double, std::size_t>> all;
      for (std::size_t m = 0; m < f.points(); ++m) {
        if (m == n) continue;
        double d = 0.0;
        for (std::size_t l = 0; l < f.coord_dim(); ++l) d += std::pow(f.coord(u, n, l) - f.coord(u, m, l), 2);
        all.emplace_back(d, m);
      }
      std::sort(all.begin(), all.end());
      auto row = t.row(u, n);
      row[0] = static_cast<std::uint32_t>(n);
      for (std::size_t i = 1; i < k; ++i) row[i] = static_cast<std::uint32_t>(all[i - 1].second);
    }
  return t;
}

TEST(Knn, KOneIsAnchorOnly) {
  std::mt19937_64 rng(1);
  const auto f = random_frame({3, 7, 1, 2}, rng);
  EXPECT_EQ(knn_neighbors(f, 1), NeighborTable::identity(3, 7));
}

TEST(Knn, CollinearTieGoesToLowerIndex) {
  PointCloudFrame f({1, 3, 0, 1});
  for (std::size_t n = 0; n < 3; ++n) f.coord(0, n, 0) = static_cast<double>(n);
  const auto t = knn_neighbors(f, 2);
  EXPECT_EQ(t(0, 0, 1), 1u);
  EXPECT_EQ(t(0, 1, 1), 0u);
  EXPECT_EQ(t(0, 2, 1), 1u);
}

TEST(Knn, MatchesBruteForceOnFivePoints) {
  std::mt19937_64 rng(42);
  const auto f = random_frame({1, 5, 1, 2}, rng);
  EXPECT_EQ(knn_neighbors(f, 3), brute_force_knn(f, 3));
}

TEST(Knn, MatchesBruteForceAcrossShapes) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng() % 40;
    const std::size_t k = 1 + rng() % n;
    const std::size_t dims = 1 + rng() % 3;
    const auto f = random_frame({1 + rng() % 3, n, 1, dims}, rng);
    ASSERT_EQ(knn_neighbors(f, k), brute_force_knn(f, k)) << "N=" << n << " K=" << k;
  }
}

TEST(Knn, MatchesBruteForceWithManyTies) {
  // Points on an integer grid produce many equal distances.
  PointCloudFrame f({1, 16, 0, 2});
  for (std::size_t n = 0; n < 16; ++n) {
    f.coord(0, n, 0) = static_cast<double>(n % 4);
    f.coord(0, n, 1) = static_cast<double>(n / 4);
  }
  for (std::size_t k = 1; k <= 16; ++k) EXPECT_EQ(knn_neighbors(f, k), brute_force_knn(f, k)) << k;
}

TEST(Knn, DuplicatePointsStayDistinctEntries) {
  PointCloudFrame f({1, 4, 0, 1});  // all coordinates equal
  const auto t = knn_neighbors(f, 4);
  EXPECT_EQ(std::vector<std::uint32_t>(t.row(0, 2).begin(), t.row(0, 2).end()),
            (std::vector<std::uint32_t>{2, 0, 1, 3}));
}

TEST(Knn, RowsAreAnchorFirstSortedAndUnique) {
  std::mt19937_64 rng(3);
  const auto f = random_frame({2, 30, 1, 2}, rng);
  const auto t = knn_neighbors(f, 9);
  for (std::size_t u = 0; u < 2; ++u)
    for (std::size_t n = 0; n < 30; ++n) {
      const auto row = t.row(u, n);
      EXPECT_EQ(row[0], n);
      std::vector<std::uint32_t> sorted(row.begin(), row.end());
      std::sort(sorted.begin(), sorted.end());
      EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
      auto dist = [&](std::size_t m) {
        return std::pow(f.coord(u, n, 0) - f.coord(u, m, 0), 2) + std::pow(f.coord(u, n, 1) - f.coord(u, m, 1), 2);
      };
      for (std::size_t i = 2; i < row.size(); ++i) EXPECT_LE(dist(row[i - 1]), dist(row[i]));
    }
}

TEST(Knn, UsesEachChannelsOwnCoordinates) {
  PointCloudFrame f({2, 3, 0, 1});
  const double c0[] = {0.0, 1.0, 5.0};
  const double c1[] = {0.0, 5.0, 1.0};
  for (std::size_t n = 0; n < 3; ++n) {
    f.coord(0, n, 0) = c0[n];
    f.coord(1, n, 0) = c1[n];
  }
  const auto t = knn_neighbors(f, 2);
  EXPECT_EQ(t(0, 0, 1), 1u);
  EXPECT_EQ(t(1, 0, 1), 2u);
}

TEST(Knn, PermutationEquivariance) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5 + rng() % 30;
    const std::size_t k = 1 + rng() % n;
    const auto f = random_frame({2, n, 1, 2}, rng);
    const auto perm = random_permutation(n, rng);
    const auto base = knn_neighbors(f, k);
    const auto moved = knn_neighbors(permute_points(f, perm), k);
    for (std::size_t u = 0; u < 2; ++u)
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t i = 0; i < k; ++i) ASSERT_EQ(moved(u, perm[p], i), perm[base(u, p, i)]);
  }
}

TEST(Knn, RejectsBadK) {
  PointCloudFrame f({1, 4, 1, 2});
  EXPECT_THROW(knn_neighbors(f, 0), ArgumentError);
  EXPECT_THROW(knn_neighbors(f, 5), ArgumentError);
  EXPECT_NO_THROW(knn_neighbors(f, 4));
}

}  // namespace
}  // namespace cloudcast
