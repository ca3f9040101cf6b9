#include "resplab/annotation.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>
#include <tuple>

#include "resplab/error.hpp"

namespace resplab {

std::string_view to_string(LabelClass cls) {
  switch (cls) {
    case LabelClass::Normal: return "normal";
    case LabelClass::Inspiration: return "inspiration";
    case LabelClass::Expiration: return "expiration";
    case LabelClass::Wheeze: return "wheeze";
    case LabelClass::Stridor: return "stridor";
    case LabelClass::Rhonchus: return "rhonchus";
    case LabelClass::Discontinuous: return "discontinuous";
    case LabelClass::Nbc: return "nbc";
    case LabelClass::Continuous: return "continuous";
    case LabelClass::Noise: return "noise";
  }
  return "normal";
}

std::optional<LabelClass> try_parse_label_class(std::string_view name) {
  for (LabelClass c : kAllLabelClasses)
    if (to_string(c) == name) return c;
  return std::nullopt;
}

LabelClass parse_label_class(std::string_view name) {
  if (auto c = try_parse_label_class(name)) return *c;
  throw Error(ErrorCode::SchemaViolation, "unknown label class '" + std::string(name) + "'");
}

std::string_view to_string(ClassGroup group) {
  switch (group) {
    case ClassGroup::Phase: return "phase";
    case ClassGroup::Cas: return "cas";
    case ClassGroup::Das: return "das";
    case ClassGroup::Noise: return "noise";
  }
  return "phase";
}

ClassGroup class_group(LabelClass cls) {
  switch (cls) {
    case LabelClass::Wheeze:
    case LabelClass::Stridor:
    case LabelClass::Rhonchus:
    case LabelClass::Continuous:
      return ClassGroup::Cas;
    case LabelClass::Discontinuous:
      return ClassGroup::Das;
    case LabelClass::Noise:
      return ClassGroup::Noise;
    case LabelClass::Inspiration:
    case LabelClass::Expiration:
    case LabelClass::Nbc:
    case LabelClass::Normal:
      return ClassGroup::Phase;
  }
  return ClassGroup::Phase;
}

TrackLayout TrackLayout::default_layout() {
  using C = LabelClass;
  return TrackLayout{{
      {0, "phase", {C::Inspiration, C::Expiration, C::Nbc, C::Normal}},
      {1, "continuous", {C::Wheeze, C::Stridor, C::Rhonchus, C::Continuous}},
      {2, "discontinuous", {C::Discontinuous}},
      {3, "noise", {C::Noise}},
  }};
}

std::optional<std::string> TrackLayout::check() const {
  std::set<int> ids;
  for (const Track& t : tracks)
    if (!ids.insert(t.track_id).second) return "duplicate track id " + std::to_string(t.track_id);
  for (LabelClass c : kAllLabelClasses) {
    int owners = 0;
    for (const Track& t : tracks)
      owners += static_cast<int>(std::count(t.allowed_classes.begin(), t.allowed_classes.end(), c));
    if (owners != 1)
      return "class '" + std::string(to_string(c)) + "' appears in " + std::to_string(owners) +
             " tracks (expected exactly 1)";
  }
  return std::nullopt;
}

const Track* TrackLayout::find(int track_id) const {
  for (const Track& t : tracks)
    if (t.track_id == track_id) return &t;
  return nullptr;
}

std::optional<int> TrackLayout::track_for(LabelClass cls) const {
  for (const Track& t : tracks)
    if (std::find(t.allowed_classes.begin(), t.allowed_classes.end(), cls) != t.allowed_classes.end())
      return t.track_id;
  return std::nullopt;
}

bool TrackLayout::allows(int track_id, LabelClass cls) const {
  const Track* t = find(track_id);
  return t && std::find(t->allowed_classes.begin(), t->allowed_classes.end(), cls) !=
                  t->allowed_classes.end();
}

std::string_view to_string(EditOp op) {
  switch (op) {
    case EditOp::Add: return "add";
    case EditOp::Resize: return "resize";
    case EditOp::Delete: return "delete";
  }
  return "add";
}

std::optional<EditOp> try_parse_edit_op(std::string_view name) {
  if (name == "add") return EditOp::Add;
  if (name == "resize") return EditOp::Resize;
  if (name == "delete") return EditOp::Delete;
  return std::nullopt;
}

std::string_view to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::Overlap: return "overlap";
    case Violation::Kind::Range: return "range";
    case Violation::Kind::InvalidInterval: return "invalid_interval";
    case Violation::Kind::ClassTrackMismatch: return "class_track_mismatch";
    case Violation::Kind::DuplicateId: return "duplicate_id";
  }
  return "overlap";
}

std::string random_label_id() {
  thread_local std::mt19937_64 rng{[] {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }()};
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(rng()));
  return buf;
}

AnnotationSet::AnnotationSet(std::string recording_id, std::string annotator, TrackLayout layout,
                             std::optional<std::int64_t> duration_ms)
    : recording_id_(std::move(recording_id)),
      annotator_(std::move(annotator)),
      layout_(std::move(layout)),
      duration_ms_(duration_ms),
      clock_(now_utc),
      id_gen_(random_label_id) {}

const Annotation* AnnotationSet::find(std::string_view id) const {
  for (const Annotation& a : annotations_)
    if (a.id == id) return &a;
  return nullptr;
}

std::vector<Annotation>::iterator AnnotationSet::locate(std::string_view id) {
  return std::find_if(annotations_.begin(), annotations_.end(),
                      [&](const Annotation& a) { return a.id == id; });
}

void AnnotationSet::check_interval(std::int64_t start_ms, std::int64_t end_ms) const {
  if (start_ms < 0 || start_ms >= end_ms || (duration_ms_ && end_ms > *duration_ms_))
    throw Error(ErrorCode::InvalidInterval,
                "[" + std::to_string(start_ms) + ", " + std::to_string(end_ms) + ") is not a valid interval" +
                    (duration_ms_ ? " within [0, " + std::to_string(*duration_ms_) + "]" : ""));
}

void AnnotationSet::check_no_overlap(int track_id, std::int64_t start_ms, std::int64_t end_ms,
                                     std::string_view ignore_id) const {
  for (const Annotation& a : annotations_) {
    if (a.track_id != track_id || a.id == ignore_id) continue;
    if (start_ms < a.end_ms && a.start_ms < end_ms)
      throw Error(ErrorCode::OverlapViolation,
                  "[" + std::to_string(start_ms) + ", " + std::to_string(end_ms) + ") overlaps " +
                      a.id + " [" + std::to_string(a.start_ms) + ", " + std::to_string(a.end_ms) +
                      ") on track " + std::to_string(track_id));
  }
}

void AnnotationSet::place(Annotation a) {
  const auto key = [](const Annotation& x) { return std::tie(x.start_ms, x.track_id, x.id); };
  auto pos = std::upper_bound(annotations_.begin(), annotations_.end(), a,
                              [&](const Annotation& l, const Annotation& r) { return key(l) < key(r); });
  annotations_.insert(pos, std::move(a));
}

void AnnotationSet::committed(EditOp op, const Annotation& a) {
  ++revision_;
  if (listener_) listener_(Edit{op, a});
}

Annotation AnnotationSet::add_label(LabelClass cls, std::int64_t start_ms, std::int64_t end_ms,
                                    const std::string& annotator) {
  check_interval(start_ms, end_ms);
  const auto track = layout_.track_for(cls);
  if (!track)
    throw Error(ErrorCode::ClassTrackMismatch,
                "class '" + std::string(to_string(cls)) + "' is not placed on any track");
  check_no_overlap(*track, start_ms, end_ms, {});

  Annotation a;
  do {
    a.id = id_gen_();
  } while (find(a.id));
  a.cls = cls;
  a.track_id = *track;
  a.start_ms = start_ms;
  a.end_ms = end_ms;
  a.annotator = annotator;
  a.created_at = a.updated_at = clock_();
  place(a);
  committed(EditOp::Add, a);
  return a;
}

Annotation AnnotationSet::resize_label(std::string_view id, std::int64_t start_ms, std::int64_t end_ms) {
  auto it = locate(id);
  if (it == annotations_.end()) throw Error(ErrorCode::NotFound, "no label '" + std::string(id) + "'");
  check_interval(start_ms, end_ms);
  check_no_overlap(it->track_id, start_ms, end_ms, id);

  Annotation a = *it;
  annotations_.erase(it);
  a.start_ms = start_ms;
  a.end_ms = end_ms;
  a.updated_at = clock_();
  place(a);
  committed(EditOp::Resize, a);
  return a;
}

Annotation AnnotationSet::delete_label(std::string_view id) {
  auto it = locate(id);
  if (it == annotations_.end()) throw Error(ErrorCode::NotFound, "no label '" + std::string(id) + "'");
  Annotation a = *it;
  annotations_.erase(it);
  committed(EditOp::Delete, a);
  return a;
}

void AnnotationSet::apply(const Edit& edit) {
  const Annotation& a = edit.label;
  switch (edit.op) {
    case EditOp::Add: {
      if (a.id.empty()) throw Error(ErrorCode::InvalidInterval, "label without id");
      if (find(a.id)) throw Error(ErrorCode::SchemaViolation, "duplicate label id '" + a.id + "'");
      check_interval(a.start_ms, a.end_ms);
      if (!layout_.allows(a.track_id, a.cls))
        throw Error(ErrorCode::ClassTrackMismatch, "class '" + std::string(to_string(a.cls)) +
                                                       "' not allowed on track " +
                                                       std::to_string(a.track_id));
      check_no_overlap(a.track_id, a.start_ms, a.end_ms, {});
      place(a);
      break;
    }
    case EditOp::Resize: {
      auto it = locate(a.id);
      if (it == annotations_.end()) throw Error(ErrorCode::NotFound, "no label '" + a.id + "'");
      if (it->cls != a.cls || it->track_id != a.track_id)
        throw Error(ErrorCode::ClassTrackMismatch, "resize of '" + a.id + "' changes class or track");
      check_interval(a.start_ms, a.end_ms);
      check_no_overlap(a.track_id, a.start_ms, a.end_ms, a.id);
      annotations_.erase(it);
      place(a);
      break;
    }
    case EditOp::Delete: {
      auto it = locate(a.id);
      if (it == annotations_.end()) throw Error(ErrorCode::NotFound, "no label '" + a.id + "'");
      annotations_.erase(it);
      break;
    }
  }
  committed(edit.op, a);
}

void AnnotationSet::insert_unchecked(Annotation a) { place(std::move(a)); }

bool AnnotationSet::same_state(const AnnotationSet& other) const {
  return revision_ == other.revision_ && annotations_ == other.annotations_;
}

std::vector<Violation> validate_set(const AnnotationSet& set) {
  std::vector<Violation> out;
  const auto& labels = set.annotations();
  const auto span_text = [](const Annotation& a) {
    return "[" + std::to_string(a.start_ms) + ", " + std::to_string(a.end_ms) + ")";
  };

  std::set<std::string_view> seen;
  for (const Annotation& a : labels) {
    if (!seen.insert(a.id).second)
      out.push_back({Violation::Kind::DuplicateId, {a.id}, "id '" + a.id + "' used more than once"});
    if (a.start_ms >= a.end_ms) {
      out.push_back({Violation::Kind::InvalidInterval, {a.id}, a.id + " has empty or reversed interval " + span_text(a)});
    } else if (a.start_ms < 0 || (set.duration_ms() && a.end_ms > *set.duration_ms())) {
      out.push_back({Violation::Kind::Range, {a.id},
                     a.id + " " + span_text(a) + " exceeds recording bounds [0, " +
                         (set.duration_ms() ? std::to_string(*set.duration_ms()) : "inf") + "]"});
    }
    if (!set.layout().allows(a.track_id, a.cls))
      out.push_back({Violation::Kind::ClassTrackMismatch, {a.id},
                     a.id + " class '" + std::string(to_string(a.cls)) + "' not allowed on track " +
                         std::to_string(a.track_id)});
  }

  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      const Annotation& a = labels[i];
      const Annotation& b = labels[j];
      if (a.track_id != b.track_id) continue;
      if (a.start_ms < b.end_ms && b.start_ms < a.end_ms)
        out.push_back({Violation::Kind::Overlap, {a.id, b.id},
                       a.id + " " + span_text(a) + " overlaps " + b.id + " " + span_text(b) +
                           " on track " + std::to_string(a.track_id)});
    }
  }
  return out;
}

}  // namespace resplab
