#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "resplab/annotation.hpp"
#include "resplab/io.hpp"

namespace resplab {

// One line of the autosave journal.
struct JournalEvent {
  std::int64_t seq = 0;  // gapless from 1 within one journal
  EditOp op = EditOp::Add;
  Annotation label;  // state after the edit; only `id` for Delete
  Timestamp at{};
  // Set revision after the edit. Lets replay skip events that a snapshot
  // already contains when a crash interrupts compaction.
  std::optional<std::int64_t> revision;

  Edit edit() const { return Edit{op, label}; }

  friend bool operator==(const JournalEvent&, const JournalEvent&) = default;
};

nlohmann::json event_to_json(const JournalEvent& ev);
// Throws SchemaViolation.
JournalEvent event_from_json(const nlohmann::json& j, const std::string& annotator);
// Compact JSON followed by '\n'.
std::string encode_event_line(const JournalEvent& ev);

struct JournalContents {
  std::vector<JournalEvent> events;
  std::size_t complete_bytes = 0;  // offset just past the last complete line
  bool discarded_tail = false;     // an unterminated final line was dropped
};

// Missing file reads as empty. A final line without '\n' is a torn write
// and is dropped; any other malformed line, or a seq gap, throws
// CorruptJournal.
JournalContents read_journal(const std::filesystem::path& path, const std::string& annotator = {});

// Applies the journal on top of `base` in seq order. Starting from a
// consistent base the result passes validate_set. Throws CorruptJournal.
AnnotationSet replay_journal(const std::filesystem::path& path, AnnotationSet base = {});

// Append-only writer. Holds an exclusive lock on "<path>.lock" for its
// lifetime; a torn tail left by a crash is cut off on open.
class Journal {
 public:
  explicit Journal(std::filesystem::path path);
  ~Journal();
  Journal(Journal&&) noexcept;
  Journal& operator=(Journal&&) noexcept;
  Journal(const Journal&) = delete;
  Journal& operator=(const Journal&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::int64_t last_seq() const { return last_seq_; }

  // Returns once the line is on stable storage. Throws SequenceGap when
  // ev.seq != last_seq() + 1, IoFailure on write errors.
  void append(const JournalEvent& ev);
  // Whole batch, one fsync.
  void append(std::span<const JournalEvent> events);

  // Truncates to empty (after a snapshot has absorbed the events).
  void reset();

 private:
  void write_all(const std::string& bytes);

  std::filesystem::path path_;
  FileLock lock_;
  int fd_ = -1;
  std::int64_t last_seq_ = 0;
};

inline std::filesystem::path journal_path_for(const std::filesystem::path& label_file) {
  auto p = label_file;
  p += ".journal";
  return p;
}

}  // namespace resplab
