#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "resplab/time.hpp"

namespace resplab {

enum class LabelClass {
  Normal,
  Inspiration,
  Expiration,
  Wheeze,
  Stridor,
  Rhonchus,
  Discontinuous,
  Nbc,
  Continuous,
  Noise,
};

inline constexpr std::array<LabelClass, 10> kAllLabelClasses = {
    LabelClass::Normal,   LabelClass::Inspiration,   LabelClass::Expiration, LabelClass::Wheeze,
    LabelClass::Stridor,  LabelClass::Rhonchus,      LabelClass::Discontinuous,
    LabelClass::Nbc,      LabelClass::Continuous,    LabelClass::Noise,
};

std::string_view to_string(LabelClass cls);
std::optional<LabelClass> try_parse_label_class(std::string_view name);
// Throws Error(SchemaViolation) for names outside the closed taxonomy.
LabelClass parse_label_class(std::string_view name);

// cas = continuous adventitious sounds, das = discontinuous adventitious sounds.
enum class ClassGroup { Phase, Cas, Das, Noise };

inline constexpr std::array<ClassGroup, 4> kAllClassGroups = {ClassGroup::Phase, ClassGroup::Cas,
                                                              ClassGroup::Das, ClassGroup::Noise};

std::string_view to_string(ClassGroup group);
ClassGroup class_group(LabelClass cls);

struct Track {
  int track_id = 0;
  std::string name;
  std::vector<LabelClass> allowed_classes;

  friend bool operator==(const Track&, const Track&) = default;
};

struct TrackLayout {
  std::vector<Track> tracks;

  // phase / continuous / discontinuous / noise lanes.
  static TrackLayout default_layout();

  // Every class in exactly one track, unique track ids. Returns a
  // description of the first problem, or nullopt when consistent.
  std::optional<std::string> check() const;

  const Track* find(int track_id) const;
  std::optional<int> track_for(LabelClass cls) const;
  bool allows(int track_id, LabelClass cls) const;

  friend bool operator==(const TrackLayout&, const TrackLayout&) = default;
};

struct Annotation {
  std::string id;
  LabelClass cls = LabelClass::Normal;
  int track_id = 0;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::string annotator;
  Timestamp created_at{};
  Timestamp updated_at{};

  std::int64_t duration_ms() const { return end_ms - start_ms; }

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

enum class EditOp { Add, Resize, Delete };

std::string_view to_string(EditOp op);
std::optional<EditOp> try_parse_edit_op(std::string_view name);

// One applied mutation. `label` holds the full state after the edit; for
// Delete only `label.id` is meaningful.
struct Edit {
  EditOp op = EditOp::Add;
  Annotation label;

  friend bool operator==(const Edit&, const Edit&) = default;
};

struct Violation {
  enum class Kind { Overlap, Range, InvalidInterval, ClassTrackMismatch, DuplicateId };
  Kind kind;
  std::vector<std::string> ids;
  std::string message;
};

std::string_view to_string(Violation::Kind kind);

// Random 128-bit identifier as 32 lowercase hex digits.
std::string random_label_id();

// Labels of one annotator on one recording. Single writer; copy to take a
// snapshot for concurrent readers.
class AnnotationSet {
 public:
  using Clock = std::function<Timestamp()>;
  using IdGenerator = std::function<std::string()>;
  using EditListener = std::function<void(const Edit&)>;

  AnnotationSet() : AnnotationSet({}, {}) {}
  AnnotationSet(std::string recording_id, std::string annotator,
                TrackLayout layout = TrackLayout::default_layout(),
                std::optional<std::int64_t> duration_ms = std::nullopt);

  const std::string& recording_id() const { return recording_id_; }
  const std::string& annotator() const { return annotator_; }
  const TrackLayout& layout() const { return layout_; }
  std::optional<std::int64_t> duration_ms() const { return duration_ms_; }
  void set_duration_ms(std::optional<std::int64_t> d) { duration_ms_ = d; }
  std::int64_t revision() const { return revision_; }
  const std::vector<Annotation>& annotations() const { return annotations_; }
  std::size_t size() const { return annotations_.size(); }
  bool empty() const { return annotations_.empty(); }
  const Annotation* find(std::string_view id) const;

  void set_clock(Clock clock) { clock_ = std::move(clock); }
  void set_id_generator(IdGenerator gen) { id_gen_ = std::move(gen); }
  // Called after every successful mutation, including apply().
  void set_edit_listener(EditListener listener) { listener_ = std::move(listener); }

  // The class decides the track. Throws InvalidInterval, ClassTrackMismatch
  // (class not placed on any track) or OverlapViolation.
  Annotation add_label(LabelClass cls, std::int64_t start_ms, std::int64_t end_ms,
                       const std::string& annotator);
  // Throws NotFound, InvalidInterval or OverlapViolation.
  Annotation resize_label(std::string_view id, std::int64_t start_ms, std::int64_t end_ms);
  Annotation delete_label(std::string_view id);

  // Replays a recorded edit verbatim (ids and timestamps preserved), under
  // the same checks as the interactive operations.
  void apply(const Edit& edit);

  // Loading paths: bypass every check so that inconsistent files can be
  // inspected with validate_set().
  void insert_unchecked(Annotation a);
  void set_revision(std::int64_t revision) { revision_ = revision; }

  // Same labels (element-wise) and revision; ignores listeners and clocks.
  bool same_state(const AnnotationSet& other) const;

 private:
  void check_interval(std::int64_t start_ms, std::int64_t end_ms) const;
  void check_no_overlap(int track_id, std::int64_t start_ms, std::int64_t end_ms,
                        std::string_view ignore_id) const;
  std::vector<Annotation>::iterator locate(std::string_view id);
  void place(Annotation a);
  void committed(EditOp op, const Annotation& a);

  std::string recording_id_;
  std::string annotator_;
  TrackLayout layout_;
  std::optional<std::int64_t> duration_ms_;
  std::vector<Annotation> annotations_;  // ordered by (start, track, id)
  std::int64_t revision_ = 0;
  Clock clock_;
  IdGenerator id_gen_;
  EditListener listener_;
};

// Every invariant violation: same-track overlaps (one per pair), intervals
// outside [0, duration], class/track mismatches, duplicate ids.
std::vector<Violation> validate_set(const AnnotationSet& set);

}  // namespace resplab
