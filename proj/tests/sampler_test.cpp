#include <test_support.hpp>

#include <gtest/gtest.h>

namespace bnis {
namespace {

using testing::figure1;
using testing::kA;
using testing::kB;
using testing::kC;

Assignment ab(StateIndex a, StateIndex b) {
  Assignment x(3);
  x[kA] = a;
  x[kB] = b;
  return x;
}

TEST(Strategy, NamesRoundTrip) {
  for (auto s : kAllStrategies) EXPECT_EQ(parse_strategy(to_string(s)), s);
  EXPECT_FALSE(parse_strategy("bogus").has_value());
}

TEST(ImportanceFunction, LwUsesClampedPriorTables) {
  const auto f = build_importance_function(figure1(), testing::figure1_evidence(), Strategy::Lw);
  EXPECT_EQ(f.sampling_order, (Ordering{kA, kB}));
  EXPECT_EQ(f.tables[0].table(), (std::vector<double>{0.2, 0.8}));
  EXPECT_EQ(f.tables[1].table(), (std::vector<double>{0.7, 0.3}));
  const auto g = induced_distribution(f, figure1(), {kB, kA});
  const double expected[] = {0.14, 0.56, 0.06, 0.24};
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(g.values()[i], expected[i]);
}

TEST(ImportanceFunction, IcptJointOnFigure1) {
  const auto f = build_importance_function(figure1(), testing::figure1_evidence(), Strategy::Icpt);
  const auto g = induced_distribution(f, figure1(), {kB, kA});
  const double expected[] = {0.0886, 0.7697, 0.0146, 0.1270};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(g.values()[i], expected[i], 5e-4);
}

TEST(ImportanceFunction, FullTablesAreExactConditionals) {
  const auto f = build_importance_function(figure1(), testing::figure1_evidence(), Strategy::Full);
  EXPECT_EQ(f.added_arcs, (std::vector<Arc>{{kA, kB}}));
  EXPECT_NEAR(f.tables[0].table()[0], 0.0608 / 0.5888, 1e-12);
  EXPECT_NEAR(f.tables[1].at(0, 0), 0.0014 / 0.0608, 1e-12);
  EXPECT_NEAR(f.tables[1].at(1, 0), 0.504 / 0.528, 1e-12);
  const auto g = induced_distribution(f, figure1(), {kB, kA});
  const double expected[] = {0.0014 / 0.5888, 0.504 / 0.5888, 0.0594 / 0.5888, 0.024 / 0.5888};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(g.values()[i], expected[i], 1e-12);
}

TEST(DrawSample, DeterministicTablesGiveProbabilityOne) {
  std::vector<Variable> vars = {{0, "A", {"t", "f"}}, {1, "B", {"t", "f"}}};
  std::vector<Cpt> cpts;
  cpts.emplace_back(0, 2, std::vector<VarId>{}, std::vector<std::size_t>{}, std::vector<double>{0.0, 1.0});
  cpts.emplace_back(1, 2, std::vector<VarId>{0}, std::vector<std::size_t>{2}, std::vector<double>{0.5, 0.5, 1.0, 0.0});
  const BayesianNetwork net("d", vars, cpts);
  const auto f = build_importance_function(net, {}, Strategy::Lw);
  for (std::uint64_t i = 0; i < 20; ++i) {
    CounterRng rng(3, i);
    auto [x, g] = draw_sample(f, rng);
    EXPECT_EQ(x[0], 1u);
    EXPECT_EQ(x[1], 0u);
    EXPECT_EQ(g, 1.0);
  }
}

TEST(DrawSample, ReportsItsOwnProbability) {
  const auto f = build_importance_function(figure1(), testing::figure1_evidence(), Strategy::Full);
  bool seen = false;
  for (std::uint64_t i = 0; i < 200 && !seen; ++i) {
    CounterRng rng(1, i);
    auto [x, g] = draw_sample(f, rng);
    if (x[kA] == 1 && x[kB] == 0) {
      EXPECT_NEAR(g, 0.504 / 0.5888, 1e-12);
      EXPECT_NEAR(g, 0.8559, 1e-4);
      seen = true;
    }
  }
  EXPECT_TRUE(seen);
}

TEST(Weigh, Examples) {
  const auto net = figure1();
  const auto e = testing::figure1_evidence();
  EXPECT_NEAR(weigh(net, e, ab(0, 0), 0.14), 0.01, 1e-15);
  EXPECT_NEAR(weigh(net, e, ab(1, 0), 0.56), 0.9, 1e-15);
  EXPECT_NEAR(weigh(net, e, ab(1, 0), 0.504 / 0.5888), 0.5888, 1e-15);
  EXPECT_THROW(weigh(net, e, ab(1, 0), 0.0), ArgumentError);
}

TEST(Estimate, HandBuiltBatch) {
  SampleBatch batch;
  batch.scope = {kA};
  batch.states = {0, 1};
  batch.weights = {1.0, 3.0};
  batch.n = 2;
  const auto s = estimate(batch, figure1());
  EXPECT_DOUBLE_EQ(s.marginals.at(kA)[0], 0.25);
  EXPECT_DOUBLE_EQ(s.marginals.at(kA)[1], 0.75);
  EXPECT_DOUBLE_EQ(s.evidence_prob_estimate, 2.0);
  EXPECT_DOUBLE_EQ(s.weight_variance, 2.0);
  EXPECT_DOUBLE_EQ(s.effective_sample_size, 1.6);
}

TEST(Estimate, AllZeroWeightsAreDegenerate) {
  SampleBatch batch;
  batch.scope = {kA};
  batch.states = {0, 1};
  batch.weights = {0.0, 0.0};
  batch.n = 2;
  EXPECT_THROW(estimate(batch, figure1()), DegenerateBatch);
}

TEST(Estimate, LwExhaustiveEnumerationIsExact) {
  // Weighting every world by g(x) * w(x) recovers the exact posterior.
  const auto net = figure1();
  const auto e = testing::figure1_evidence();
  const auto f = build_importance_function(net, e, Strategy::Lw);
  const auto g = induced_distribution(f, net, {kA, kB});
  double pa = 0.0, total = 0.0;
  for (StateIndex a = 0; a < 2; ++a)
    for (StateIndex b = 0; b < 2; ++b) {
      const double gx = g.values()[a * 2 + b];
      const double w = weigh(net, e, ab(a, b), gx) * gx;
      total += w;
      if (a == 0) pa += w;
    }
  EXPECT_NEAR(total, 0.5888, 1e-15);
  EXPECT_NEAR(pa / total, 0.0608 / 0.5888, 1e-15);
}

class StrategyProperty : public ::testing::TestWithParam<Strategy> {};

TEST_P(StrategyProperty, SupportCoversThePosteriorAndGIsNormalized) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const auto net = gen_random_network(9, 3, 2, seed);
    const auto e = testing::random_evidence(net, 2, seed);
    const auto f = build_importance_function(net, e, GetParam());
    const auto g = induced_distribution(f, net);
    EXPECT_NEAR(g.total(), 1.0, 1e-9);
    // Expected weight under g equals P(E) exactly when supp g covers supp P(., e).
    double expected_weight = 0.0;
    double pe = 0.0;
    std::vector<StateIndex> dense(net.size());
    testing::for_each_world(net, e, [&](const std::vector<StateIndex>& x) {
      const double p = testing::world_probability(net, x);
      pe += p;
      std::size_t idx = 0;
      for (std::size_t k = 0; k < f.sampling_order.size(); ++k)
        idx = idx * net.cardinality(f.sampling_order[k]) + x[f.sampling_order[k]];
      const double gx = g.values()[idx];
      if (p > 0.0) {
        EXPECT_GT(gx, 0.0) << "seed " << seed;
      }
      if (gx > 0.0) expected_weight += gx * (p / gx);
    });
    EXPECT_NEAR(expected_weight, pe, 1e-12 + 1e-9 * pe) << "seed " << seed;
  }
}

TEST_P(StrategyProperty, ThreadCountDoesNotChangeTheBatch) {
  const auto net = gen_random_network(20, 3, 3, 5);
  const auto e = testing::random_evidence(net, 3, 5);
  const auto f = build_importance_function(net, e, GetParam());
  const auto one = sample(net, e, f, 6000, 42, 1);
  const auto four = sample(net, e, f, 6000, 42, 4);
  EXPECT_EQ(one.states, four.states);
  EXPECT_EQ(one.weights, four.weights);
}

INSTANTIATE_TEST_SUITE_P(AllStrategies, StrategyProperty, ::testing::ValuesIn(kAllStrategies),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Sampler, MeanWeightIsUnbiased) {
  const auto net = gen_random_network(12, 3, 2, 8);
  const auto e = testing::random_evidence(net, 3, 8);
  const double pe = testing::brute_force_marginals(net, e).second;
  for (auto s : {Strategy::Lw, Strategy::Icpt, Strategy::EvParents}) {
    const auto f = build_importance_function(net, e, s);
    const auto batch = sample(net, e, f, 200000, 9);
    const auto est = estimate(batch, net);
    const double se = std::sqrt(est.weight_variance / 200000.0);
    EXPECT_NEAR(est.evidence_prob_estimate, pe, 5.0 * se + 1e-12) << to_string(s);
  }
}

TEST(Sampler, FullHasZeroVariance) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto net = gen_random_network(10, 3, 2, seed);
    const auto e = testing::random_evidence(net, 3, seed);
    const double pe = testing::brute_force_marginals(net, e).second;
    const auto f = build_importance_function(net, e, Strategy::Full);
    const auto batch = sample(net, e, f, 500, seed);
    for (double w : batch.weights) EXPECT_NEAR(w, pe, 1e-9 * pe) << "seed " << seed;
  }
}

TEST(Sampler, ExactEvParentsFillingIsSupported) {
  SamplerConfig cfg;
  cfg.exact_evparents = true;
  const auto f = build_importance_function(figure1(), testing::figure1_evidence(), Strategy::EvParents, cfg);
  EXPECT_NEAR(f.tables[1].at(1, 0), 0.504 / 0.528, 1e-12);
}

}  // namespace
}  // namespace bnis
