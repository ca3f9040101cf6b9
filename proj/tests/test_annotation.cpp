#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "resplab/annotation.hpp"
#include "resplab/error.hpp"
#include "support.hpp"

using namespace resplab;

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

AnnotationSet fresh(std::optional<std::int64_t> duration = 15000) {
  AnnotationSet set("rec", "alice", TrackLayout::default_layout(), duration);
  testing::make_deterministic(set);
  return set;
}

}  // namespace

TEST_SUITE("annotation") {

TEST_CASE("taxonomy names round trip") {
  for (LabelClass c : kAllLabelClasses) CHECK(parse_label_class(to_string(c)) == c);
  CHECK(to_string(LabelClass::Nbc) == "nbc");
  CHECK_FALSE(try_parse_label_class("crackle"));
  CHECK(code_of([] { parse_label_class("crackle"); }) == ErrorCode::SchemaViolation);
}

TEST_CASE("class groups") {
  CHECK(class_group(LabelClass::Wheeze) == ClassGroup::Cas);
  CHECK(class_group(LabelClass::Stridor) == ClassGroup::Cas);
  CHECK(class_group(LabelClass::Rhonchus) == ClassGroup::Cas);
  CHECK(class_group(LabelClass::Continuous) == ClassGroup::Cas);
  CHECK(class_group(LabelClass::Discontinuous) == ClassGroup::Das);
  CHECK(class_group(LabelClass::Inspiration) == ClassGroup::Phase);
  CHECK(class_group(LabelClass::Noise) == ClassGroup::Noise);
  std::map<ClassGroup, int> sizes;
  for (LabelClass c : kAllLabelClasses) ++sizes[class_group(c)];
  int total = 0;
  for (auto [g, n] : sizes) total += n;
  CHECK(total == static_cast<int>(kAllLabelClasses.size()));
  CHECK(sizes.size() == kAllClassGroups.size());
}

TEST_CASE("default layout is consistent") {
  const auto layout = TrackLayout::default_layout();
  CHECK_FALSE(layout.check());
  for (LabelClass c : kAllLabelClasses) {
    const auto t = layout.track_for(c);
    REQUIRE(t);
    CHECK(layout.allows(*t, c));
  }
  CHECK(layout.track_for(LabelClass::Inspiration) == layout.track_for(LabelClass::Expiration));
  CHECK(layout.track_for(LabelClass::Inspiration) != layout.track_for(LabelClass::Wheeze));

  TrackLayout broken = layout;
  broken.tracks[1].allowed_classes.push_back(LabelClass::Inspiration);
  CHECK(broken.check());
  broken = layout;
  broken.tracks[1].track_id = broken.tracks[0].track_id;
  CHECK(broken.check());
}

TEST_CASE("add") {
  auto set = fresh();
  const Annotation a = set.add_label(LabelClass::Inspiration, 0, 930, "alice");
  CHECK(set.size() == 1);
  CHECK(a.duration_ms() == 930);
  CHECK(a.track_id == *set.layout().track_for(LabelClass::Inspiration));
  CHECK(a.created_at == a.updated_at);
  CHECK(set.revision() == 1);
  CHECK(code_of([&] { set.add_label(LabelClass::Expiration, 500, 900, "alice"); }) == ErrorCode::OverlapViolation);
  CHECK(set.size() == 1);
  CHECK(set.revision() == 1);
  CHECK(code_of([&] { set.add_label(LabelClass::Expiration, 900, 900, "alice"); }) == ErrorCode::InvalidInterval);
  CHECK(code_of([&] { set.add_label(LabelClass::Expiration, 14000, 15001, "alice"); }) == ErrorCode::InvalidInterval);
  CHECK(code_of([&] { set.add_label(LabelClass::Expiration, -5, 10, "alice"); }) == ErrorCode::InvalidInterval);
  // touching intervals are allowed
  set.add_label(LabelClass::Expiration, 930, 1800, "alice");
  CHECK(set.size() == 2);
}

TEST_CASE("labels on different tracks may overlap") {
  auto set = fresh();
  set.add_label(LabelClass::Inspiration, 0, 930, "alice");
  set.add_label(LabelClass::Wheeze, 100, 800, "alice");
  set.add_label(LabelClass::Discontinuous, 200, 400, "alice");
  set.add_label(LabelClass::Noise, 0, 15000, "alice");
  CHECK(set.size() == 4);
  CHECK(validate_set(set).empty());
}

TEST_CASE("classes off the layout") {
  TrackLayout layout{{Track{0, "phase", {LabelClass::Inspiration, LabelClass::Expiration}}}};
  AnnotationSet set("r", "u", layout);
  CHECK(code_of([&] { set.add_label(LabelClass::Wheeze, 0, 10, "u"); }) == ErrorCode::ClassTrackMismatch);
}

TEST_CASE("resize") {
  auto set = fresh();
  const auto a = set.add_label(LabelClass::Inspiration, 0, 930, "alice");
  const auto b = set.add_label(LabelClass::Expiration, 1000, 1900, "alice");
  const auto same = set.resize_label(a.id, 0, 930);
  CHECK(same.start_ms == 0);
  CHECK(same.end_ms == 930);
  CHECK(same.created_at == a.created_at);
  CHECK(same.updated_at > a.updated_at);
  CHECK(set.revision() == 3);
  CHECK(code_of([&] { set.resize_label(a.id, 0, 1001); }) == ErrorCode::OverlapViolation);
  CHECK(code_of([&] { set.resize_label(a.id, 500, 500); }) == ErrorCode::InvalidInterval);
  CHECK(code_of([&] { set.resize_label("nope", 0, 10); }) == ErrorCode::NotFound);
  CHECK(set.find(a.id)->end_ms == 930);
  set.resize_label(b.id, 930, 2000);
  CHECK(set.find(b.id)->start_ms == 930);
}

TEST_CASE("delete") {
  auto set = fresh();
  const auto a = set.add_label(LabelClass::Inspiration, 0, 930, "alice");
  set.delete_label(a.id);
  CHECK(set.empty());
  CHECK(set.revision() == 2);
  set.add_label(LabelClass::Inspiration, 0, 930, "alice");
  CHECK(set.size() == 1);
  CHECK(code_of([&] { set.delete_label("nope"); }) == ErrorCode::NotFound);
}

TEST_CASE("labels stay ordered by start") {
  auto set = fresh();
  set.add_label(LabelClass::Noise, 5000, 6000, "alice");
  set.add_label(LabelClass::Inspiration, 0, 100, "alice");
  set.add_label(LabelClass::Wheeze, 2000, 3000, "alice");
  const auto& l = set.annotations();
  CHECK(std::is_sorted(l.begin(), l.end(), [](const Annotation& x, const Annotation& y) { return x.start_ms < y.start_ms; }));
}

TEST_CASE("listener sees every committed edit and replay reproduces the set") {
  auto set = fresh();
  std::vector<Edit> edits;
  set.set_edit_listener([&](const Edit& e) { edits.push_back(e); });
  const auto a = set.add_label(LabelClass::Inspiration, 0, 930, "alice");
  set.add_label(LabelClass::Wheeze, 0, 500, "alice");
  set.resize_label(a.id, 10, 900);
  try {
    set.add_label(LabelClass::Expiration, 100, 200, "alice");
  } catch (const Error&) {
  }
  set.delete_label(a.id);
  REQUIRE(edits.size() == 4);
  CHECK(edits[0].op == EditOp::Add);
  CHECK(edits[2].op == EditOp::Resize);
  CHECK(edits[3].op == EditOp::Delete);

  AnnotationSet replica("rec", "alice", TrackLayout::default_layout(), 15000);
  for (const Edit& e : edits) replica.apply(e);
  CHECK(replica.same_state(set));
  CHECK(code_of([&] { replica.apply(edits[1]); }) == ErrorCode::SchemaViolation);
}

TEST_CASE("validate_set") {
  auto set = fresh(10000);
  set.add_label(LabelClass::Inspiration, 0, 930, "alice");
  CHECK(validate_set(set).empty());

  Annotation x{"x", LabelClass::Expiration, 0, 500, 1200, "alice", {}, {}};
  set.insert_unchecked(x);
  auto v = validate_set(set);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == Violation::Kind::Overlap);
  CHECK(v[0].ids.size() == 2);
  CHECK(std::count(v[0].ids.begin(), v[0].ids.end(), "x") == 1);

  auto ranged = fresh(10000);
  ranged.insert_unchecked(Annotation{"r", LabelClass::Noise, 3, 9000, 10500, "alice", {}, {}});
  v = validate_set(ranged);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == Violation::Kind::Range);

  auto misc = fresh();
  misc.insert_unchecked(Annotation{"m", LabelClass::Wheeze, 0, 0, 10, "alice", {}, {}});
  misc.insert_unchecked(Annotation{"m", LabelClass::Noise, 3, 20, 10, "alice", {}, {}});
  v = validate_set(misc);
  std::multiset<Violation::Kind> kinds;
  for (const auto& e : v) kinds.insert(e.kind);
  CHECK(kinds.count(Violation::Kind::ClassTrackMismatch) == 1);
  CHECK(kinds.count(Violation::Kind::DuplicateId) == 1);
  CHECK(kinds.count(Violation::Kind::InvalidInterval) == 1);
}

TEST_CASE("random edits never break the invariants") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> op_dist(0, 2), cls_dist(0, static_cast<int>(kAllLabelClasses.size()) - 1);
  std::uniform_int_distribution<std::int64_t> t_dist(-100, 15100);
  for (int trial = 0; trial < 50; ++trial) {
    auto set = fresh();
    for (int step = 0; step < 200; ++step) {
      const auto before = set.revision();
      const auto size_before = set.size();
      bool ok = true;
      try {
        const int op = set.empty() ? 0 : op_dist(rng);
        std::int64_t s = t_dist(rng), e = t_dist(rng);
        if (op == 0) {
          set.add_label(kAllLabelClasses[cls_dist(rng)], s, e, "alice");
        } else {
          const auto& pick = set.annotations()[std::uniform_int_distribution<std::size_t>(0, set.size() - 1)(rng)];
          if (op == 1)
            set.resize_label(pick.id, s, e);
          else
            set.delete_label(std::string(pick.id));
        }
      } catch (const Error&) {
        ok = false;
      }
      if (!ok) {
        CHECK(set.revision() == before);
        CHECK(set.size() == size_before);
      } else {
        CHECK(set.revision() == before + 1);
      }
      REQUIRE(validate_set(set).empty());
    }
  }
}

TEST_CASE("random ids") {
  const auto a = random_label_id();
  CHECK(a.size() == 32);
  CHECK(std::all_of(a.begin(), a.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)) && !std::isupper(static_cast<unsigned char>(c)); }));
  CHECK(a != random_label_id());
}

}  // TEST_SUITE
