/*
 * Copyright 2026 The lbo Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "lbo/learners.hpp"

namespace lbo {
namespace {

ActionSpec act(const char* name) { return ActionSpec::simple(Designation(name)); }

ConditionSet sym(const std::string& v) { return ConditionSet{{"x", v}}; }

ConditionSet four(const std::string& a, const std::string& b, const std::string& c,
                  const std::string& d) {
  return ConditionSet{{"a", a}, {"b", b}, {"c", c}, {"d", d}};
}

Proposal prop(const char* action, double r, Method m, ExperienceId src = 0) {
  return Proposal{act(action), r, m, src};
}

// Fixture values worked out by hand from the stop-probability model:
// P(change) = 1 / (1 + blend * n / (1 - blend)) with blend 0.2 and n = 2
// gives 0.8 / 1.2 = 2/3, i.e. log2(1.5) bits.
constexpr double kTwoValueCostBits = 0.58496250072115619;
constexpr double kTwoValueProbability = 2.0 / 3.0;

TEST(Recall, NoReferenceOrLeafGivesNothing) {
  ExperienceTree t;
  const auto leaf = t.store_experience(sym("a"), act("p"));
  EXPECT_TRUE(recall_propose(t, std::nullopt, sym("a")).empty());
  EXPECT_TRUE(recall_propose(t, leaf, sym("a")).empty());
}

TEST(Recall, ChildWithEqualConditionsIsCertain) {
  ExperienceTree t;
  const auto ref = t.store_experience(sym("a"), act("p"));
  const auto child = t.store_experience(sym("b"), act("q"));
  const auto out = recall_propose(t, ref, sym("b"));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].action, act("q"));
  EXPECT_DOUBLE_EQ(out[0].reliability, 1.0);
  EXPECT_EQ(out[0].method, Method::Recall);
  EXPECT_EQ(out[0].source_experience, child);
}

TEST(Recall, OrderedByReliability) {
  ExperienceTree t;
  const auto ref = t.store_experience(four("0", "0", "0", "0"), act("r"));
  t.store_experience(four("1", "9", "9", "9"), act("low"));   // 0.25 to the probe
  t.reset_sequence_anchor();
  t.store_experience(four("0", "0", "0", "0"), act("r"));
  t.store_experience(four("1", "1", "1", "9"), act("high"));  // 0.75
  const auto out = recall_propose(t, ref, four("1", "1", "1", "1"));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].action, act("high"));
  EXPECT_DOUBLE_EQ(out[0].reliability, 0.75);
  EXPECT_EQ(out[1].action, act("low"));
  EXPECT_DOUBLE_EQ(out[1].reliability, 0.25);
}

TEST(KStar, IdentityIsZero) {
  KStarParams p;
  const ConditionSet c{{"x", std::string("a")}, {"y", 3.5}};
  EXPECT_EQ(kstar_distance(c, c, p), 0.0);
}

TEST(KStar, SymbolicMismatchCostIsConstant) {
  KStarParams p;
  const double ab = kstar_distance(sym("a"), sym("b"), p);
  EXPECT_NEAR(ab, kTwoValueCostBits, 1e-15);
  EXPECT_EQ(kstar_distance(sym("c"), sym("z"), p), ab);
  EXPECT_EQ(kstar_distance(sym("b"), sym("a"), p), ab);
}

TEST(KStar, NumericExponentialModel) {
  KStarParams p;
  p.numeric_scale["y"] = 2.0;
  // 2^-d == exp(-|dx| / scale)
  const double d = kstar_distance(ConditionSet{{"y", 1.0}}, ConditionSet{{"y", 4.0}}, p);
  EXPECT_NEAR(std::exp2(-d), std::exp(-1.5), 1e-15);
}

TEST(KStar, TwoAttributesAdd) {
  KStarParams p;
  p.numeric_scale["y"] = 0.5;
  const ConditionSet a{{"x", std::string("a")}, {"y", 0.0}};
  const ConditionSet b{{"x", std::string("b")}, {"y", 1.0}};
  const double x_only = kstar_distance(sym("a"), sym("b"), p);
  const double y_only = kstar_distance(ConditionSet{{"y", 0.0}}, ConditionSet{{"y", 1.0}}, p);
  EXPECT_DOUBLE_EQ(kstar_distance(a, b, p), x_only + y_only);
  EXPECT_NEAR(y_only, 2.0 / std::log(2.0), 1e-12);
}

TEST(KStar, KeyMismatchAndBadBlend) {
  KStarParams p;
  EXPECT_THROW(kstar_distance(sym("a"), ConditionSet{{"q", std::string("a")}}, p), KeyMismatch);
  p.blend = 0.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p.blend = 1.5;
  EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(Classify, EmptyMemory) {
  ExperienceTree t;
  EXPECT_TRUE(classify_propose(t, sym("a"), KStarParams{}).empty());
}

TEST(Classify, ExactMatchIsExactlyOne) {
  ExperienceTree t;
  t.store_experience(ConditionSet{{"x", std::string("a")}, {"y", 0.3}}, act("p"));
  t.store_experience(ConditionSet{{"x", std::string("b")}, {"y", 0.9}}, act("q"));
  const auto out =
      classify_propose(t, ConditionSet{{"x", std::string("a")}, {"y", 0.3}}, KStarParams{});
  ASSERT_FALSE(out.empty());
  EXPECT_EQ(out[0].action, act("p"));
  EXPECT_EQ(out[0].reliability, 1.0);
  EXPECT_EQ(out[0].method, Method::Classification);
}

TEST(Classify, ThreeInstanceSymbolicFixture) {
  ExperienceTree t;
  t.store_experience(sym("a"), act("X"));
  t.store_experience(sym("b"), act("Y"));
  t.store_experience(sym("a"), act("X"));
  const auto out = classify_propose(t, sym("a"), KStarParams{});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].action, act("X"));
  EXPECT_EQ(out[0].reliability, 1.0);
  EXPECT_EQ(out[1].action, act("Y"));
  EXPECT_NEAR(out[1].reliability, kTwoValueProbability, 1e-15);
}

TEST(Classify, NumericFixtureWithFittedScale) {
  // Values {0, 1} stored, probe 0.25: mean 5/12, mean absolute deviation 7/18.
  ExperienceTree t;
  t.store_experience(ConditionSet{{"x", 0.0}}, act("L"));
  t.store_experience(ConditionSet{{"x", 1.0}}, act("R"));
  const auto out = classify_propose(t, ConditionSet{{"x", 0.25}}, KStarParams{});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].action, act("L"));
  EXPECT_NEAR(out[0].reliability, std::exp(-9.0 / 14.0), 1e-12);
  EXPECT_EQ(out[1].action, act("R"));
  EXPECT_NEAR(out[1].reliability, std::exp(-27.0 / 14.0), 1e-12);
}

TEST(Classify, EqualReliabilityBrokenByMassThenName) {
  ExperienceTree t;
  t.store_experience(ConditionSet{{"x", std::string("a")}, {"y", std::string("0")}}, act("B"));
  t.store_experience(ConditionSet{{"x", std::string("b")}, {"y", std::string("1")}}, act("A"));
  const auto out =
      classify_propose(t, ConditionSet{{"x", std::string("b")}, {"y", std::string("0")}},
                       KStarParams{});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].reliability, out[1].reliability);
  EXPECT_EQ(out[0].action, act("A"));
}

TEST(Combine, WeightedScoreDecides) {
  const std::vector<Proposal> r = {prop("a", 0.8, Method::Recall)};
  const std::vector<Proposal> c = {prop("b", 0.9, Method::Classification)};
  const auto best = combine(r, c, MethodWeights{0.5, 0.3});
  ASSERT_TRUE(best);
  EXPECT_EQ(best->proposal.action, act("a"));
  EXPECT_DOUBLE_EQ(best->final_reliability, 0.4);
}

TEST(Combine, EmptyInputs) {
  EXPECT_FALSE(combine({}, {}, MethodWeights{1, 1}));
}

TEST(Combine, ColdStartFallsBackToRawReliability) {
  const std::vector<Proposal> r = {prop("a", 0.6, Method::Recall)};
  const std::vector<Proposal> c = {prop("b", 0.9, Method::Classification)};
  const auto best = combine(r, c, MethodWeights{});
  ASSERT_TRUE(best);
  EXPECT_EQ(best->proposal.action, act("b"));
  EXPECT_EQ(best->final_reliability, 0.0);
}

TEST(Combine, FullTieGoesToRecallThenLowestId) {
  const std::vector<Proposal> r = {prop("x", 0.5, Method::Recall, 7),
                                   prop("y", 0.5, Method::Recall, 3)};
  const std::vector<Proposal> c = {prop("a", 0.5, Method::Classification)};
  const auto best = combine(r, c, MethodWeights{});
  ASSERT_TRUE(best);
  EXPECT_EQ(best->proposal.action, act("y"));
}

TEST(UpdateWeight, Rules) {
  auto w = update_weight({}, Method::Recall, Outcome::Appropriate, 0.7);
  EXPECT_DOUBLE_EQ(w.recall, 0.7);
  EXPECT_DOUBLE_EQ(w.classification, 0.0);
  w = update_weight({0.3, 0.0}, Method::Recall, Outcome::Inappropriate, 0.7);
  EXPECT_EQ(w.recall, 0.0);
  w = update_weight({0.0, 1.0}, Method::Classification, Outcome::Inappropriate, 0.4);
  EXPECT_DOUBLE_EQ(w.classification, 0.6);
  EXPECT_THROW(update_weight({}, Method::Recall, Outcome::Appropriate, 1.5), InvalidArgument);
}

TEST(Propose, BundlesBothMethods) {
  ExperienceTree t;
  const auto ref = t.store_experience(sym("a"), act("p"));
  t.store_experience(sym("b"), act("q"));
  const auto set = propose(t, ref, sym("b"), MethodWeights{1.0, 1.0}, KStarParams{});
  ASSERT_NE(set.top(Method::Recall), nullptr);
  ASSERT_NE(set.top(Method::Classification), nullptr);
  EXPECT_EQ(set.top(Method::Recall)->action, act("q"));
  EXPECT_EQ(set.top(Method::Classification)->action, act("q"));
  ASSERT_TRUE(set.best);
  EXPECT_EQ(set.best->proposal.method, Method::Recall);
}

}  // namespace
}  // namespace lbo
