#include "miniworld/metrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "miniworld/rng.hpp"

using namespace miniworld;

namespace {

std::vector<double> normal_sample(int n, RngStream& rng) {
  std::vector<double> xs(n);
  for (double& x : xs) x = rng.gaussian();
  return xs;
}

}  // namespace

TEST(Summarize, SmallFixture) {
  const GenerationRecord r = summarize_generation({3, -1, 0}, {3, 0, 1});
  EXPECT_DOUBLE_EQ(r.best_energy, 3.0);
  EXPECT_NEAR(r.mean_energy, 2.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(r.best_fitness, 3.0);
  EXPECT_EQ(r.total_food, 4);
  EXPECT_EQ(r.total_poison, 2);  // food - energy
}

TEST(Summarize, AllZeros) {
  const GenerationRecord r = summarize_generation(std::vector<int>(20, 0),
                                                  std::vector<int>(20, 0));
  EXPECT_DOUBLE_EQ(r.best_energy, 0.0);
  EXPECT_DOUBLE_EQ(r.mean_energy, 0.0);
  EXPECT_EQ(r.total_food, 0);
  EXPECT_EQ(r.total_poison, 0);
}

TEST(Summarize, MatchesNaiveScan) {
  RngStream rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> energies, fitnesses;
    for (int i = 0; i < 20; ++i) {
      const int food = static_cast<int>(rng.uniform_int(50));
      const int poison = static_cast<int>(rng.uniform_int(30));
      fitnesses.push_back(food);
      energies.push_back(food - poison);
    }
    const GenerationRecord r = summarize_generation(energies, fitnesses);
    EXPECT_DOUBLE_EQ(r.best_energy, *std::max_element(energies.begin(), energies.end()));
    double sum = 0;
    for (int e : energies) sum += e;
    EXPECT_NEAR(r.mean_energy, sum / 20.0, 1e-12);
    EXPECT_GE(r.best_energy, r.mean_energy);
    EXPECT_EQ(r.total_food - r.total_poison, static_cast<long>(sum));
  }
}

TEST(Summarize, LengthMismatchThrows) {
  EXPECT_THROW(summarize_generation({1, 2}, {1, 2, 3}), std::invalid_argument);
  EXPECT_THROW(summarize_generation({}, {}), std::invalid_argument);
}

TEST(RankSum, ExactSeparatedSamples) {
  const RankSumResult r = rank_sum_test({1, 2, 3}, {4, 5, 6});
  EXPECT_DOUBLE_EQ(r.u, 0.0);
  EXPECT_DOUBLE_EQ(r.p, 0.1);  // 2/20 orderings as extreme
}

TEST(RankSum, IdenticalSamples) {
  const std::vector<double> xs{1, 2, 3, 4};
  const RankSumResult r = rank_sum_test(xs, xs);
  EXPECT_DOUBLE_EQ(r.u, 8.0);  // n^2 / 2
  EXPECT_GT(r.p, 0.95);
}

TEST(RankSum, IdenticalConstantsDegenerate) {
  const std::vector<double> a(10, 7.0), b(12, 7.0);
  const RankSumResult r = rank_sum_test(a, b);
  EXPECT_DOUBLE_EQ(r.p, 1.0);
  const RankSumResult small = rank_sum_test(std::vector<double>(3, 1.0),
                                            std::vector<double>(3, 1.0));
  EXPECT_DOUBLE_EQ(small.p, 1.0);
}

TEST(RankSum, SwapSymmetry) {
  RngStream rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n_a = 3 + static_cast<int>(rng.uniform_int(10));
    const int n_b = 3 + static_cast<int>(rng.uniform_int(10));
    std::vector<double> a = normal_sample(n_a, rng);
    std::vector<double> b = normal_sample(n_b, rng);
    if (trial % 3 == 0) {  // inject ties
      for (double& x : a) x = std::round(x * 2) / 2;
      for (double& x : b) x = std::round(x * 2) / 2;
    }
    const RankSumResult ab = rank_sum_test(a, b);
    const RankSumResult ba = rank_sum_test(b, a);
    EXPECT_NEAR(ab.u + ba.u, static_cast<double>(n_a) * n_b, 1e-9);
    EXPECT_NEAR(ab.p, ba.p, 1e-9);
  }
}

TEST(RankSum, ExactMatchesNormalApproximationAtEight) {
  RngStream rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> a = normal_sample(8, rng);
    const std::vector<double> b = normal_sample(8, rng);
    const double exact = rank_sum_exact(a, b).p;
    const double approx = rank_sum_normal(a, b).p;
    worst = std::max(worst, std::abs(exact - approx));
  }
  EXPECT_LT(worst, 0.02);
}

TEST(RankSum, DispatchBoundary) {
  RngStream rng(9);
  const std::vector<double> a7 = normal_sample(7, rng);
  const std::vector<double> b7 = normal_sample(7, rng);
  const RankSumResult dispatched = rank_sum_test(a7, b7);
  const RankSumResult exact = rank_sum_exact(a7, b7);
  EXPECT_DOUBLE_EQ(dispatched.p, exact.p);  // below 8 -> exact path

  const std::vector<double> a8 = normal_sample(8, rng);
  const std::vector<double> b8 = normal_sample(8, rng);
  const RankSumResult large = rank_sum_test(a8, b8);
  const RankSumResult approx = rank_sum_normal(a8, b8);
  EXPECT_DOUBLE_EQ(large.p, approx.p);  // at 8 -> normal approximation
}

TEST(RankSum, EmptySampleThrows) {
  EXPECT_THROW(rank_sum_test({}, {1.0}), std::invalid_argument);
  EXPECT_THROW(rank_sum_test({1.0}, {}), std::invalid_argument);
}

TEST(RankSum, DetectsLocationShift) {
  RngStream rng(11);
  std::vector<double> a = normal_sample(30, rng);
  std::vector<double> b = normal_sample(30, rng);
  for (double& x : b) x += 3.0;
  EXPECT_LT(rank_sum_test(a, b).p, 1e-6);
}

TEST(Aggregate, SingleRunHasZeroSd) {
  std::vector<GenerationRecord> records;
  for (int g = 0; g < 5; ++g) {
    GenerationRecord r;
    r.run_id = 0;
    r.generation = g;
    r.best_energy = 10.0 + g;
    r.mean_energy = 2.0 * g;
    records.push_back(r);
  }
  const RunAggregate agg = aggregate_runs(records);
  ASSERT_EQ(agg.generations.size(), 5u);
  for (std::size_t g = 0; g < 5; ++g) {
    EXPECT_DOUBLE_EQ(agg.best_energy_mean[g], 10.0 + g);
    EXPECT_DOUBLE_EQ(agg.best_energy_sd[g], 0.0);
  }
  ASSERT_EQ(agg.final_best_energy.size(), 1u);
  EXPECT_DOUBLE_EQ(agg.final_best_energy[0], 14.0);
  EXPECT_DOUBLE_EQ(agg.final_mean_energy[0], 8.0);
}

TEST(Aggregate, TwoConstantRunsAverage) {
  std::vector<GenerationRecord> records;
  for (int run = 0; run < 2; ++run) {
    for (int g = 0; g < 3; ++g) {
      GenerationRecord r;
      r.run_id = run;
      r.generation = g;
      r.best_energy = run == 0 ? 10.0 : 20.0;
      r.mean_energy = run == 0 ? 10.0 : 20.0;
      records.push_back(r);
    }
  }
  const RunAggregate agg = aggregate_runs(records);
  for (std::size_t g = 0; g < 3; ++g) {
    EXPECT_DOUBLE_EQ(agg.best_energy_mean[g], 15.0);
    EXPECT_DOUBLE_EQ(agg.best_energy_sd[g], std::sqrt(50.0));  // sample sd
  }
}

TEST(Aggregate, PermutationInvariant) {
  RngStream rng(13);
  std::vector<GenerationRecord> records;
  for (int run = 0; run < 4; ++run) {
    for (int g = 0; g < 6; ++g) {
      GenerationRecord r;
      r.run_id = run;
      r.generation = g;
      r.best_energy = rng.uniform(0, 50);
      r.mean_energy = rng.uniform(-5, 5);
      records.push_back(r);
    }
  }
  const RunAggregate forward_order = aggregate_runs(records);
  std::vector<GenerationRecord> shuffled = records;
  // Deterministic shuffle.
  for (std::size_t i = shuffled.size(); i > 1; --i) {
    std::swap(shuffled[i - 1], shuffled[rng.uniform_int(i)]);
  }
  const RunAggregate shuffled_order = aggregate_runs(shuffled);
  EXPECT_EQ(forward_order.best_energy_mean, shuffled_order.best_energy_mean);
  EXPECT_EQ(forward_order.mean_energy_sd, shuffled_order.mean_energy_sd);
  EXPECT_EQ(forward_order.final_best_energy, shuffled_order.final_best_energy);
}

TEST(Aggregate, RaggedGridThrows) {
  std::vector<GenerationRecord> records;
  GenerationRecord r;
  r.run_id = 0;
  r.generation = 0;
  records.push_back(r);
  r.generation = 1;
  records.push_back(r);
  r.run_id = 1;
  r.generation = 0;
  records.push_back(r);  // run 1 misses generation 1
  EXPECT_THROW(aggregate_runs(records), std::invalid_argument);
  EXPECT_THROW(aggregate_runs({}), std::invalid_argument);
}
