#include <test_support.hpp>

#include <gtest/gtest.h>

namespace bnis {
namespace {

using testing::figure1;
using testing::kA;
using testing::kB;
using testing::kC;

Assignment world(std::initializer_list<StateIndex> states) {
  Assignment x(states.size());
  VarId v = 0;
  for (auto s : states) x[v++] = s;
  return x;
}

TEST(Validate, Figure1IsValid) { EXPECT_TRUE(validate_network(figure1()).ok()); }

TEST(Validate, SelfLoopIsACycle) {
  std::vector<Variable> vars = {{0, "A", {"t", "f"}}};
  std::vector<Cpt> cpts;
  cpts.emplace_back(0, 2, std::vector<VarId>{0}, std::vector<std::size_t>{2}, std::vector<double>{0.5, 0.5, 0.5, 0.5});
  BayesianNetwork net("loop", vars, cpts);
  auto report = validate_network(net);
  EXPECT_TRUE(report.has(IssueKind::Cycle));
}

TEST(Validate, RowSumViolation) {
  std::vector<Variable> vars = {{0, "A", {"t", "f"}}};
  std::vector<Cpt> cpts;
  cpts.emplace_back(0, 2, std::vector<VarId>{}, std::vector<std::size_t>{}, std::vector<double>{0.5, 0.6});
  auto report = validate_network(BayesianNetwork("bad", vars, cpts));
  ASSERT_EQ(report.issues.size(), 1u);
  EXPECT_EQ(report.issues[0].kind, IssueKind::RowSum);
}

TEST(Validate, ArityAndMissingCpt) {
  std::vector<Variable> vars = {{0, "A", {"t", "f", "u"}}, {1, "B", {"t", "f"}}};
  std::vector<Cpt> cpts;
  cpts.emplace_back(0, 2, std::vector<VarId>{}, std::vector<std::size_t>{}, std::vector<double>{0.5, 0.5});
  auto report = validate_network(BayesianNetwork("bad", vars, cpts));
  EXPECT_TRUE(report.has(IssueKind::Arity));
  EXPECT_TRUE(report.has(IssueKind::MissingCpt));
}

TEST(Validate, ToleranceIsOneInABillion) {
  std::vector<Variable> vars = {{0, "A", {"t", "f"}}};
  std::vector<Cpt> ok, bad;
  ok.emplace_back(0, 2, std::vector<VarId>{}, std::vector<std::size_t>{}, std::vector<double>{0.5, 0.5 + 5e-10});
  bad.emplace_back(0, 2, std::vector<VarId>{}, std::vector<std::size_t>{}, std::vector<double>{0.5, 0.5 + 5e-9});
  EXPECT_TRUE(validate_network(BayesianNetwork("ok", vars, ok)).ok());
  EXPECT_FALSE(validate_network(BayesianNetwork("bad", vars, bad)).ok());
}

TEST(Cpt, RowMajorLastParentFastest) {
  const auto net = figure1();
  const auto& c = net.cpt(kC);
  std::vector<StateIndex> a_notb = {0, 1};
  EXPECT_EQ(c.config_index(a_notb), 1u);
  EXPECT_DOUBLE_EQ(c.at(1, 1), 0.99);
  EXPECT_EQ(c.decode_config(2), (std::vector<StateIndex>{1, 0}));
}

TEST(Cpt, WrongEntryCountThrows) {
  EXPECT_THROW(Cpt(0, 2, {}, {}, {0.2, 0.3, 0.5}), ArgumentError);
}

TEST(JointProbability, Figure1Entries) {
  const auto net = figure1();
  EXPECT_NEAR(joint_probability(net, world({0, 0, 1})), 0.2 * 0.7 * 0.01, 1e-15);
  EXPECT_NEAR(joint_probability(net, world({0, 0, 1})), 0.0014, 1e-15);
  EXPECT_NEAR(joint_probability(net, world({1, 0, 1})), 0.504, 1e-15);
}

TEST(JointProbability, ZeroEntryGivesZero) {
  std::vector<Variable> vars = {{0, "A", {"t", "f"}}};
  std::vector<Cpt> cpts;
  cpts.emplace_back(0, 2, std::vector<VarId>{}, std::vector<std::size_t>{}, std::vector<double>{1.0, 0.0});
  EXPECT_EQ(joint_probability(BayesianNetwork("z", vars, cpts), world({1})), 0.0);
}

TEST(JointProbability, IncompleteAssignmentThrows) {
  Assignment x(3);
  x[kA] = 0;
  x[kB] = 0;
  EXPECT_THROW(joint_probability(figure1(), x), ArgumentError);
}

TEST(JointProbability, SumsToOneOverAllWorlds) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto net = gen_random_network(12, 3, 2, seed);
    double total = 0.0;
    testing::for_each_world(net, {}, [&](const std::vector<StateIndex>& x) {
      Assignment a;
      a.states = x;
      total += joint_probability(net, a);
    });
    EXPECT_NEAR(total, 1.0, 1e-9) << "seed " << seed;
  }
}

TEST(Assignment, ScopeListsSetVariables) {
  Assignment x(4);
  x[1] = 0;
  x[3] = 1;
  EXPECT_EQ(x.scope(), (std::vector<VarId>{1, 3}));
  EXPECT_EQ(with_evidence(x, {{0, 1}}).scope(), (std::vector<VarId>{0, 1, 3}));
}

}  // namespace
}  // namespace bnis
