#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "resplab/annotation.hpp"
#include "resplab/journal.hpp"

namespace resplab {

// "<data_root>/<recording_id>/<user_id>.labels.json"
std::filesystem::path label_file_path(const std::filesystem::path& data_root,
                                      const std::string& recording_id, const std::string& user_id);
std::filesystem::path finalized_marker_for(const std::filesystem::path& label_file);

// Atomically replaces the snapshot. Does not touch the journal.
void write_snapshot(const AnnotationSet& set, const std::filesystem::path& label_file);

// Compaction: writes the snapshot, then empties "<label_file>.journal".
// The set must pass validate_set. Takes the journal lock, so it fails with
// Locked while a LabelSession is open on the same file.
void snapshot_labels(const AnnotationSet& set, const std::filesystem::path& label_file);

// Snapshot (when present) plus journal replay. Without a snapshot the base is
// an empty set for (recording_id, annotator). SchemaViolation for bad
// snapshots, CorruptJournal for bad journals.
AnnotationSet load_labels(const std::filesystem::path& label_file, const std::string& recording_id = {},
                          const std::string& annotator = {},
                          const TrackLayout& layout = TrackLayout::default_layout(),
                          std::optional<std::int64_t> duration_ms = std::nullopt);

// The single writer for one (recording, user) label file: every mutation
// is journaled and fsynced before it returns.
class LabelSession {
 public:
  LabelSession(std::filesystem::path label_file, const std::string& recording_id,
               const std::string& annotator, const TrackLayout& layout = TrackLayout::default_layout(),
               std::optional<std::int64_t> duration_ms = std::nullopt);

  const AnnotationSet& labels() const { return set_; }
  const std::filesystem::path& label_file() const { return label_file_; }
  std::int64_t journal_seq() const { return journal_.last_seq(); }

  void set_clock(AnnotationSet::Clock clock);

  Annotation add_label(LabelClass cls, std::int64_t start_ms, std::int64_t end_ms);
  Annotation resize_label(std::string_view id, std::int64_t start_ms, std::int64_t end_ms);
  Annotation delete_label(std::string_view id);

  // Events authored elsewhere (the browser). Seqs must continue the
  // journal; the batch is checked against a copy first and is applied all
  // or nothing. SequenceGap on bad seq, other Error codes on edits that do
  // not apply.
  void append_events(std::span<const JournalEvent> events);

  // Snapshot + journal reset.
  void compact();

 private:
  template <typename Mutation>
  Annotation journaled(Mutation&& mutate);

  std::filesystem::path label_file_;
  Journal journal_;
  AnnotationSet set_;
  AnnotationSet::Clock clock_ = now_utc;
};

}  // namespace resplab
