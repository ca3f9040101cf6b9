#include <random>

#include "doctest.h"
#include "resplab/error.hpp"
#include "resplab/metrics.hpp"
#include "support.hpp"

using namespace resplab;
using IV = std::vector<Interval>;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoFailure;
}

EvalConfig event_cfg(double iou = 0.5) {
  EvalConfig c;
  c.mode = EvalMode::Event;
  c.match_min_iou = iou;
  return c;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("worked segment example") {
  const IV ref{{0, 1000}}, pred{{500, 1500}};
  const Counts c = segment_counts(ref, pred, 1500, 50);
  CHECK(c == Counts{10, 10, 10});
  CHECK(c.f1() == 0.5);
  CHECK(c.precision() == 0.5);
  CHECK(c.recall() == 0.5);
  CHECK(segment_f1(ref, pred, 1500, EvalConfig{}).rows.at(0).counts.f1() == 0.5);
}

TEST_CASE("worked event examples") {
  CHECK(event_counts(IV{{0, 1000}}, IV{{500, 1500}}, 0.5) == Counts{0, 1, 1});
  CHECK(event_f1(IV{{0, 1000}}, IV{{500, 1500}}, event_cfg()).rows.at(0).counts.f1() == 0.0);
  const IV ref{{0, 1000}, {2000, 3000}}, pred{{0, 900}, {2100, 3000}};
  const Counts c = event_counts(ref, pred, 0.5);
  CHECK(c == Counts{2, 0, 0});
  CHECK(c.f1() == 1.0);
  CHECK(testing::exhaustive_max_matching(ref, pred, 0.5) == 2);
}

TEST_CASE("perfect and empty predictions") {
  const IV ref{{100, 400}, {900, 1300}};
  CHECK(segment_counts(ref, ref, 2000, 50).f1() == 1.0);
  CHECK(event_counts(ref, ref, 0.5).f1() == 1.0);
  CHECK(segment_counts(ref, IV{}, 2000, 50).f1() == 0.0);
  CHECK(event_counts(ref, IV{}, 0.5) == Counts{0, 0, 2});
  const Counts none = event_counts(IV{}, IV{}, 0.5);
  CHECK_FALSE(none.defined());
  CHECK(none.f1() == 0.0);
}

TEST_CASE("IoU threshold boundary is inclusive") {
  // [0,100) vs [0,50): IoU exactly 0.5
  CHECK(event_counts(IV{{0, 100}}, IV{{0, 50}}, 0.5).tp == 1);
  CHECK(event_counts(IV{{0, 100}}, IV{{0, 49}}, 0.5).tp == 0);
  // touching intervals never match
  CHECK(event_counts(IV{{0, 100}}, IV{{100, 200}}, 0.01).tp == 0);
}

TEST_CASE("greedy matching prefers higher IoU and is one to one") {
  const IV ref{{0, 1000}}, pred{{0, 800}, {0, 1000}};
  const auto m = match_events(ref, pred, 0.5);
  REQUIRE(m.size() == 1);
  CHECK(m[0] == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK(event_counts(ref, pred, 0.5) == Counts{1, 1, 0});
}

TEST_CASE("segment frames and horizon errors") {
  // partial last frame counts as a frame
  CHECK(segment_counts(IV{{1000, 1020}}, IV{}, 1020, 50) == Counts{0, 0, 1});
  CHECK(segment_counts(IV{{0, 10}}, IV{{40, 50}}, 50, 50) == Counts{1, 0, 0});
  CHECK(code_of([] { segment_counts(IV{{0, 10}}, IV{}, 0, 50); }) == ErrorCode::InvalidHorizon);
  CHECK(code_of([] { segment_counts(IV{{0, 110}}, IV{}, 100, 50); }) == ErrorCode::InvalidHorizon);
  EvalConfig bad;
  bad.frame_ms = 0;
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::ConfigInvalid);
  bad = event_cfg(1.5);
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("segment scoring matches frame enumeration") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::int64_t frame = std::uniform_int_distribution<std::int64_t>(1, 120)(rng);
    const std::int64_t horizon = std::uniform_int_distribution<std::int64_t>(50, 3000)(rng);
    const auto ref = testing::random_intervals(rng, 6, horizon, 7, false);
    const auto pred = testing::random_intervals(rng, 6, horizon, 7, false);
    const auto h = std::max<std::int64_t>(horizon, 1);
    REQUIRE(segment_counts(ref, pred, h, frame) == testing::enumerate_segment_counts(ref, pred, h, frame));
  }
}

TEST_CASE("event tp equals maximum matching") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 2000; ++trial) {
    const bool disjoint = trial % 2 == 0;
    const auto ref = testing::random_intervals(rng, 6, 2000, 50, disjoint);
    const auto pred = testing::random_intervals(rng, 6, 2000, 50, disjoint);
    REQUIRE(event_counts(ref, pred, 0.5).tp == testing::exhaustive_max_matching(ref, pred, 0.5));
  }
}

TEST_CASE("augmenting paths fix a greedy miss on overlapping events") {
  // Greedy takes ref0-pred1 (IoU 1) and strands ref1, whose only candidate is pred1.
  const IV ref{{0, 1000}, {0, 600}}, pred{{300, 1000}, {0, 1000}};
  CHECK(testing::exhaustive_max_matching(ref, pred, 0.5) == 2);
  const auto m = match_events(ref, pred, 0.5);
  REQUIRE(m.size() == 2);
  CHECK(m[0] == std::pair<std::size_t, std::size_t>{0, 0});
  CHECK(m[1] == std::pair<std::size_t, std::size_t>{1, 1});
}

TEST_CASE("greedy pairing is kept on disjoint inputs") {
  const IV ref{{0, 1000}, {1000, 2000}}, pred{{100, 1000}, {1000, 1900}, {1900, 3000}};
  const auto m = match_events(ref, pred, 0.5);
  REQUIRE(m.size() == 2);
  CHECK(m[0] == std::pair<std::size_t, std::size_t>{0, 0});
  CHECK(m[1] == std::pair<std::size_t, std::size_t>{1, 1});
}

TEST_CASE("symmetry and translation invariance") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const auto ref = testing::random_intervals(rng, 6, 3000, 10, true);
    const auto pred = testing::random_intervals(rng, 6, 3000, 10, true);
    const Counts a = event_counts(ref, pred, 0.5), b = event_counts(pred, ref, 0.5);
    CHECK(a.tp == b.tp);
    CHECK(a.fp == b.fn);
    CHECK(a.f1() == b.f1());
    const Counts s = segment_counts(ref, pred, 3000, 50), t = segment_counts(pred, ref, 3000, 50);
    CHECK(s.f1() == t.f1());
    IV ref2 = ref, pred2 = pred;
    for (auto& iv : ref2) iv = {iv.start_ms + 500, iv.end_ms + 500};
    for (auto& iv : pred2) iv = {iv.start_ms + 500, iv.end_ms + 500};
    CHECK(event_counts(ref2, pred2, 0.5) == a);
    CHECK(segment_counts(ref2, pred2, 3500, 50) == segment_counts(ref, pred, 3000, 50));
  }
}

TEST_CASE("evaluate over a corpus") {
  LabelCorpus ref, pred;
  ref["r1"][LabelClass::Wheeze] = {{0, 1000}};
  ref["r1"][LabelClass::Inspiration] = {{0, 900}, {1000, 1900}};
  ref["r2"][LabelClass::Stridor] = {{0, 500}};
  pred["r1"][LabelClass::Wheeze] = {{0, 1000}};
  pred["r1"][LabelClass::Inspiration] = {{0, 900}};
  pred["r2"][LabelClass::Rhonchus] = {{0, 500}};

  const EvalReport exact = evaluate(ref, pred, event_cfg());
  CHECK(*exact.find("wheeze") == Counts{1, 0, 0});
  CHECK(*exact.find("inspiration") == Counts{1, 0, 1});
  CHECK(*exact.find("stridor") == Counts{0, 0, 1});
  CHECK(*exact.find("rhonchus") == Counts{0, 1, 0});
  CHECK_FALSE(exact.find("noise")->defined());

  EvalConfig grouped = event_cfg();
  grouped.class_mapping = ClassMapping::ByGroup;
  const EvalReport g = evaluate(ref, pred, grouped);
  CHECK(g.find("wheeze") == nullptr);
  CHECK(*g.find("cas") == Counts{2, 0, 0});
  CHECK(*g.find("inspiration") == Counts{1, 0, 1});

  const std::string csv = report_to_csv(exact);
  CHECK(csv.rfind("target,tp,fp,fn,precision,recall,f1\n", 0) == 0);
  CHECK(csv.find("wheeze,1,0,0,1") != std::string::npos);
  CHECK(csv.find("noise,0,0,0,undefined,undefined,undefined") != std::string::npos);

  // segment mode, horizon from the latest end
  const EvalReport seg = evaluate(ref, pred, EvalConfig{});
  CHECK(*seg.find("inspiration") == Counts{18, 0, 18});
}

TEST_CASE("class mapping targets") {
  CHECK(target_for(LabelClass::Wheeze, ClassMapping::ExactClass) == "wheeze");
  CHECK(target_for(LabelClass::Wheeze, ClassMapping::ByGroup) == "cas");
  CHECK(target_for(LabelClass::Discontinuous, ClassMapping::ByGroup) == "das");
  CHECK(target_for(LabelClass::Expiration, ClassMapping::ByGroup) == "expiration");
  CHECK(all_targets(ClassMapping::ExactClass).size() == kAllLabelClasses.size());
}

TEST_CASE("corpus from an annotation set") {
  AnnotationSet set("rec", "u");
  set.add_label(LabelClass::Wheeze, 500, 700, "u");
  set.add_label(LabelClass::Wheeze, 0, 100, "u");
  const auto corpus = corpus_from_set(set);
  CHECK(corpus.at("rec").at(LabelClass::Wheeze) == IV{{0, 100}, {500, 700}});
}

}  // TEST_SUITE
