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

#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "lbo/scenarios/hand.hpp"
#include "lbo/software_image.hpp"

namespace lbo {
namespace {

ActionSpec act(const char* name) { return ActionSpec::simple(Designation(name)); }

StaticImage car_image(const char* speed = "speed") {
  return StaticImage({PartSpec{Designation("car"),
                               {Designation(speed), Designation("position")},
                               {Designation("lights")},
                               {ActuatorSpec{Designation("engine"), {act("push"), act("pull")}}}}});
}

ConditionSet car_conditions(double speed) {
  return ConditionSet{{"speed", speed}, {"position", 0.0}, {"lights", std::string("on")}};
}

TEST(Designation, RejectsEmptyName) {
  EXPECT_THROW(Designation(""), InvalidArgument);
  EXPECT_EQ(Designation("a"), Designation("a"));
  EXPECT_NE(Designation("a"), Designation("A"));
}

TEST(CompareStatic, IdentityAndSingleSensorDifference) {
  EXPECT_TRUE(compare_static(car_image(), car_image()));
  EXPECT_FALSE(compare_static(car_image(), car_image("velocity")));
}

TEST(CompareStatic, OrderInsensitive) {
  const StaticImage a({
      PartSpec{Designation("p1"),
               {Designation("s1"), Designation("s2")},
               {Designation("v1")},
               {ActuatorSpec{Designation("m1"), {act("x"), act("y")}},
                ActuatorSpec{Designation("m2"), {act("z")}}}},
      PartSpec{Designation("p2"), {Designation("s3")}, {}, {}},
  });
  const StaticImage b({
      PartSpec{Designation("p2"), {Designation("s3")}, {}, {}},
      PartSpec{Designation("p1"),
               {Designation("s2"), Designation("s1")},
               {Designation("v1")},
               {ActuatorSpec{Designation("m2"), {act("z")}},
                ActuatorSpec{Designation("m1"), {act("y"), act("x")}}}},
  });
  EXPECT_TRUE(compare_static(a, b));
  EXPECT_TRUE(compare_static(b, a));
}

TEST(CompareStatic, SensorAndAttributeAreDistinctRoles) {
  const StaticImage a({PartSpec{Designation("p"), {Designation("x")}, {}, {}}});
  const StaticImage b({PartSpec{Designation("p"), {}, {Designation("x")}, {}}});
  EXPECT_FALSE(compare_static(a, b));
}

TEST(StaticImage, RejectsDuplicatesAndEmpty) {
  EXPECT_THROW(StaticImage({}), InvalidArgument);
  EXPECT_THROW(StaticImage({PartSpec{Designation("p"), {}, {}, {}},
                            PartSpec{Designation("p"), {}, {}, {}}}),
               InvalidArgument);
  EXPECT_THROW(
      StaticImage({PartSpec{Designation("p"), {Designation("s"), Designation("s")}, {}, {}}}),
      InvalidArgument);
  EXPECT_THROW(StaticImage({PartSpec{Designation("p"),
                                     {},
                                     {},
                                     {ActuatorSpec{Designation("m"), {act("a"), act("a")}}}}}),
               InvalidArgument);
}

TEST(SupportsTask, EmptyRequirementAlwaysHolds) {
  TaskOntology ont({{"any", std::set<std::string>{}}});
  EXPECT_TRUE(supports_task(car_image(), car_image("velocity"), Designation("any"), ont));
}

TEST(SupportsTask, MissingSensorFails) {
  TaskOntology ont({{"drive", {"speed", "push"}}});
  EXPECT_TRUE(supports_task(car_image(), car_image(), Designation("drive"), ont));
  EXPECT_FALSE(supports_task(car_image(), car_image("velocity"), Designation("drive"), ont));
}

TEST(SupportsTask, HandImagesShareEveryHandElement) {
  std::set<std::string> req = {hand::kNumberSensor, "thumb", "index", "middle", "ring", "pinky"};
  for (auto f : hand::kFingers) req.insert(hand::finger_attribute(f));
  TaskOntology ont({{"sign-numbers", req}});
  EXPECT_TRUE(supports_task(hand::hand_static_image(), hand::hand_static_image(),
                            Designation("sign-numbers"), ont));
}

TEST(SupportsTask, UnknownTaskThrows) {
  TaskOntology ont;
  EXPECT_THROW(supports_task(car_image(), car_image(), Designation("nope"), ont), UnknownTask);
}

TEST(Flatten, ExpandsDepthFirst) {
  EXPECT_EQ(flatten(act("x")), std::vector<ActionSpec>{act("x")});
  const auto ab = ActionSpec::composite(Designation("ab"), {act("a"), act("b")});
  EXPECT_EQ(flatten(ab), (std::vector<ActionSpec>{act("a"), act("b")}));
  const auto nested = ActionSpec::composite(
      Designation("n"), {act("a"), ActionSpec::composite(Designation("bc"), {act("b"), act("c")})});
  EXPECT_EQ(flatten(nested), (std::vector<ActionSpec>{act("a"), act("b"), act("c")}));
  EXPECT_THROW(ActionSpec::composite(Designation("e"), {}), InvalidArgument);
}

TEST(ConditionSet, RejectsNonFiniteNumbers) {
  ConditionSet c;
  EXPECT_THROW(c.set("x", std::numeric_limits<double>::infinity()), InvalidArgument);
  EXPECT_THROW(c.set("x", std::numeric_limits<double>::quiet_NaN()), InvalidArgument);
}

TEST(DynamicImage, RecordAppendsWithSequenceNumbers) {
  DynamicImage d(3);
  EXPECT_TRUE(d.read_history().empty());
  EXPECT_EQ(d.record_snapshot(act("push"), car_conditions(0)), 0u);
  const auto h = d.read_history();
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h[0].seq, 0u);
  EXPECT_EQ(h[0].action, act("push"));
}

TEST(DynamicImage, EvictsOldestFirst) {
  DynamicImage d(3);
  for (int i = 0; i < 4; ++i) d.record_snapshot(act("push"), car_conditions(i));
  const auto h = d.read_history();
  ASSERT_EQ(h.size(), 3u);
  EXPECT_EQ(h[0].seq, 1u);
  EXPECT_EQ(h[2].seq, 3u);
}

TEST(DynamicImage, ReadIsNonDestructive) {
  DynamicImage d;
  d.record_snapshot(act("push"), car_conditions(1));
  d.record_snapshot(act("pull"), car_conditions(2));
  const auto a = d.read_history();
  const auto b = d.read_history();
  ASSERT_EQ(a.size(), 2u);
  EXPECT_LT(a[0].seq, a[1].seq);
  EXPECT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].seq, b[i].seq);
}

TEST(DynamicImage, RejectsConditionsOutsideTheImage) {
  DynamicImage d(10, car_image().condition_keys());
  EXPECT_NO_THROW(d.record_snapshot(act("push"), car_conditions(0)));
  EXPECT_THROW(d.record_snapshot(act("push"), ConditionSet{{"speed", 1.0}}), InvalidArgument);
}

TEST(DynamicImage, SubscriberReceivesSnapshotsInOrder) {
  DynamicImage d;
  std::vector<std::uint64_t> log;
  d.subscribe([&](const Snapshot& s) { log.push_back(s.seq); });
  for (int i = 0; i < 5; ++i) d.record_snapshot(act("push"), car_conditions(i));
  EXPECT_EQ(log, (std::vector<std::uint64_t>{0, 1, 2, 3, 4}));
}

TEST(ImageIndex, RegisterFindDeregister) {
  ImageIndex idx;
  TaskOntology ont;
  EXPECT_TRUE(idx.find_candidates(car_image(), std::nullopt, ont).empty());
  idx.register_image("e1", car_image(), std::make_shared<DynamicImage>());
  EXPECT_EQ(idx.find_candidates(car_image(), std::nullopt, ont),
            std::vector<std::string>{"e1"});
  EXPECT_THROW(idx.register_image("e1", car_image(), std::make_shared<DynamicImage>()),
               DuplicateRegistration);
  idx.deregister("e1");
  EXPECT_TRUE(idx.find_candidates(car_image(), std::nullopt, ont).empty());
}

TEST(ImageIndex, FindsInRegistrationOrderExcludingObserver) {
  ImageIndex idx;
  TaskOntology ont;
  for (const char* id : {"c", "a", "me", "b"})
    idx.register_image(id, car_image(), std::make_shared<DynamicImage>());
  idx.register_image("odd", car_image("velocity"), std::make_shared<DynamicImage>());
  EXPECT_EQ(idx.find_candidates(car_image(), std::nullopt, ont, "me"),
            (std::vector<std::string>{"c", "a", "b"}));
}

TEST(ImageIndex, TaskFilterDropsExpertMissingSensor) {
  ImageIndex idx;
  TaskOntology ont({{"drive", {"speed"}}, {"light", {"lights"}}});
  idx.register_image("e", car_image("velocity"), std::make_shared<DynamicImage>());
  EXPECT_TRUE(idx.find_candidates(car_image(), Designation("drive"), ont).empty());
  EXPECT_EQ(idx.find_candidates(car_image(), Designation("light"), ont),
            std::vector<std::string>{"e"});
}

TEST(ImageIndex, SubscriptionSeesOnlyLaterSnapshots) {
  ImageIndex idx;
  auto dyn = std::make_shared<DynamicImage>();
  idx.register_image("e", car_image(), dyn);
  dyn->record_snapshot(act("push"), car_conditions(0));
  std::vector<std::uint64_t> got;
  const auto sub = idx.subscribe("e", [&](const Snapshot& s) { got.push_back(s.seq); });
  dyn->record_snapshot(act("pull"), car_conditions(1));
  EXPECT_EQ(got, std::vector<std::uint64_t>{1});
  idx.unsubscribe(sub);
  dyn->record_snapshot(act("pull"), car_conditions(2));
  EXPECT_EQ(got, std::vector<std::uint64_t>{1});
  EXPECT_EQ(dyn->read_history().size(), 3u);
}

TEST(ImageIndex, SubscribeUnknownAgentThrows) {
  ImageIndex idx;
  EXPECT_THROW(idx.subscribe("ghost", [](const Snapshot&) {}), UnknownAgent);
}

TEST(ImageIndex, DeregisterDropsSubscriptions) {
  ImageIndex idx;
  auto dyn = std::make_shared<DynamicImage>();
  idx.register_image("e", car_image(), dyn);
  int calls = 0;
  idx.subscribe("e", [&](const Snapshot&) { ++calls; });
  idx.deregister("e");
  dyn->record_snapshot(act("push"), car_conditions(0));
  EXPECT_EQ(calls, 0);
  EXPECT_EQ(dyn->subscriber_count(), 0u);
}

}  // namespace
}  // namespace lbo
