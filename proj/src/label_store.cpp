#include "resplab/label_store.hpp"

#include "resplab/error.hpp"
#include "resplab/io.hpp"
#include "resplab/label_codec.hpp"

namespace resplab {

namespace fs = std::filesystem;

fs::path label_file_path(const fs::path& data_root, const std::string& recording_id,
                         const std::string& user_id) {
  return data_root / recording_id / (user_id + ".labels.json");
}

fs::path finalized_marker_for(const fs::path& label_file) {
  auto p = label_file;
  p += ".final";
  return p;
}

void write_snapshot(const AnnotationSet& set, const fs::path& label_file) {
  write_file_atomic(label_file, snapshot_to_json(set).dump(2) + "\n");
}

void snapshot_labels(const AnnotationSet& set, const fs::path& label_file) {
  if (const auto v = validate_set(set); !v.empty())
    throw Error(ErrorCode::SchemaViolation, "refusing to snapshot an invalid set: " + v.front().message);
  if (label_file.has_parent_path()) fs::create_directories(label_file.parent_path());
  Journal journal(journal_path_for(label_file));
  write_snapshot(set, label_file);
  journal.reset();
}

AnnotationSet load_labels(const fs::path& label_file, const std::string& recording_id,
                          const std::string& annotator, const TrackLayout& layout,
                          std::optional<std::int64_t> duration_ms) {
  AnnotationSet base(recording_id, annotator, layout, duration_ms);
  std::error_code ec;
  if (fs::exists(label_file, ec)) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_file_text(label_file));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::SchemaViolation, label_file.string() + ": " + e.what());
    }
    base = snapshot_from_json(doc, layout, duration_ms);
  }
  return replay_journal(journal_path_for(label_file), std::move(base));
}

LabelSession::LabelSession(fs::path label_file, const std::string& recording_id,
                           const std::string& annotator, const TrackLayout& layout,
                           std::optional<std::int64_t> duration_ms)
    : label_file_(std::move(label_file)),
      journal_([&] {
        if (label_file_.has_parent_path()) fs::create_directories(label_file_.parent_path());
        return journal_path_for(label_file_);
      }()),
      set_(load_labels(label_file_, recording_id, annotator, layout, duration_ms)) {}

void LabelSession::set_clock(AnnotationSet::Clock clock) {
  clock_ = clock;
  set_.set_clock(std::move(clock));
}

template <typename Mutation>
Annotation LabelSession::journaled(Mutation&& mutate) {
  AnnotationSet next = set_;
  std::optional<Edit> edit;
  next.set_edit_listener([&](const Edit& e) { edit = e; });
  Annotation result = mutate(next);
  next.set_edit_listener({});
  JournalEvent ev{journal_.last_seq() + 1, edit->op, edit->label, clock_(), next.revision()};
  journal_.append(ev);
  set_ = std::move(next);
  return result;
}

Annotation LabelSession::add_label(LabelClass cls, std::int64_t start_ms, std::int64_t end_ms) {
  return journaled([&](AnnotationSet& s) { return s.add_label(cls, start_ms, end_ms, s.annotator()); });
}

Annotation LabelSession::resize_label(std::string_view id, std::int64_t start_ms, std::int64_t end_ms) {
  return journaled([&](AnnotationSet& s) { return s.resize_label(id, start_ms, end_ms); });
}

Annotation LabelSession::delete_label(std::string_view id) {
  return journaled([&](AnnotationSet& s) { return s.delete_label(id); });
}

void LabelSession::append_events(std::span<const JournalEvent> events) {
  if (events.empty()) return;
  AnnotationSet next = set_;
  std::vector<JournalEvent> stamped(events.begin(), events.end());
  std::int64_t expected = journal_.last_seq() + 1;
  for (JournalEvent& ev : stamped) {
    if (ev.seq != expected)
      throw Error(ErrorCode::SequenceGap, "seq " + std::to_string(ev.seq) + " where " +
                                              std::to_string(expected) + " was expected");
    ev.label.annotator = next.annotator();
    next.apply(ev.edit());
    ev.revision = next.revision();
    if (ev.at == Timestamp{}) ev.at = clock_();
    ++expected;
  }
  journal_.append(stamped);
  set_ = std::move(next);
}

void LabelSession::compact() {
  write_snapshot(set_, label_file_);
  journal_.reset();
}

}  // namespace resplab
