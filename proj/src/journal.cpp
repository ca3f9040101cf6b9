#include "resplab/journal.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "resplab/error.hpp"
#include "resplab/label_codec.hpp"

namespace resplab {

namespace fs = std::filesystem;

namespace {

fs::path lock_path_for(const fs::path& journal) {
  auto p = journal;
  p += ".lock";
  return p;
}

[[noreturn]] void io_fail(const std::string& what, const fs::path& path) {
  throw Error(ErrorCode::IoFailure, what + " '" + path.string() + "': " + std::strerror(errno));
}

}  // namespace

nlohmann::json event_to_json(const JournalEvent& ev) {
  nlohmann::json j{{"seq", ev.seq}, {"op", std::string(to_string(ev.op))}, {"at", format_rfc3339(ev.at)}};
  if (ev.revision) j["rev"] = *ev.revision;
  if (ev.op == EditOp::Delete)
    j["id"] = ev.label.id;
  else
    j["label"] = annotation_to_json(ev.label);
  return j;
}

JournalEvent event_from_json(const nlohmann::json& j, const std::string& annotator) {
  const std::string where = "event";
  JournalEvent ev;
  ev.seq = schema::integer(j, "seq", where);
  if (ev.seq < 1) schema::fail(where + ".seq", "must be >= 1");
  const std::string op = schema::string(j, "op", where);
  const auto parsed = try_parse_edit_op(op);
  if (!parsed) schema::fail(where + ".op", "unknown op '" + op + "'");
  ev.op = *parsed;
  if (j.contains("at")) {
    try {
      ev.at = parse_rfc3339(schema::string(j, "at", where));
    } catch (const Error& e) {
      schema::fail(where + ".at", e.what());
    }
  }
  if (j.contains("rev")) ev.revision = schema::integer(j, "rev", where);
  if (ev.op == EditOp::Delete) {
    ev.label.id = schema::string(j, "id", where);
    ev.label.annotator = annotator;
  } else {
    ev.label = annotation_from_json(schema::field(j, "label", where), annotator, where + ".label");
  }
  return ev;
}

std::string encode_event_line(const JournalEvent& ev) { return event_to_json(ev).dump() + "\n"; }

JournalContents read_journal(const fs::path& path, const std::string& annotator) {
  JournalContents out;
  std::error_code ec;
  if (!fs::exists(path, ec)) return out;
  const std::string text = read_file_text(path);

  std::size_t line_start = 0;
  std::size_t line_no = 0;
  while (line_start < text.size()) {
    const std::size_t nl = text.find('\n', line_start);
    if (nl == std::string::npos) {
      out.discarded_tail = true;
      break;
    }
    ++line_no;
    const std::string_view line(text.data() + line_start, nl - line_start);
    try {
      const auto j = nlohmann::json::parse(line);
      JournalEvent ev = event_from_json(j, annotator);
      const std::int64_t expected = out.events.empty() ? 1 : out.events.back().seq + 1;
      if (ev.seq != expected)
        throw Error(ErrorCode::CorruptJournal, "seq " + std::to_string(ev.seq) + " where " +
                                                   std::to_string(expected) + " was expected");
      out.events.push_back(std::move(ev));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::CorruptJournal,
                  path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::CorruptJournal,
                  path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
    line_start = nl + 1;
    out.complete_bytes = line_start;
  }
  return out;
}

AnnotationSet replay_journal(const fs::path& path, AnnotationSet base) {
  const auto contents = read_journal(path, base.annotator());
  const std::int64_t base_revision = base.revision();
  const bool base_valid = validate_set(base).empty();
  for (const JournalEvent& ev : contents.events) {
    if (ev.revision && *ev.revision <= base_revision) continue;
    try {
      base.apply(ev.edit());
    } catch (const Error& e) {
      throw Error(ErrorCode::CorruptJournal,
                  path.string() + " seq " + std::to_string(ev.seq) + " does not apply: " + e.what());
    }
  }
  if (const auto violations = base_valid ? validate_set(base) : std::vector<Violation>{};
      !violations.empty())
    throw Error(ErrorCode::CorruptJournal, path.string() + " replays to an invalid set: " +
                                               violations.front().message);
  return base;
}

Journal::Journal(fs::path path)
    : path_(std::move(path)), lock_(lock_path_for(path_), FileLock::Mode::Try) {
  const auto contents = read_journal(path_);
  last_seq_ = contents.events.empty() ? 0 : contents.events.back().seq;
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) io_fail("cannot open journal", path_);
  if (contents.discarded_tail) {
    if (::ftruncate(fd_, static_cast<off_t>(contents.complete_bytes)) != 0 || ::fsync(fd_) != 0)
      io_fail("cannot trim torn journal tail", path_);
  }
}

Journal::~Journal() {
  if (fd_ >= 0) ::close(fd_);
}

Journal::Journal(Journal&& other) noexcept
    : path_(std::move(other.path_)), lock_(std::move(other.lock_)), fd_(other.fd_), last_seq_(other.last_seq_) {
  other.fd_ = -1;
}

Journal& Journal::operator=(Journal&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    path_ = std::move(other.path_);
    lock_ = std::move(other.lock_);
    fd_ = other.fd_;
    last_seq_ = other.last_seq_;
    other.fd_ = -1;
  }
  return *this;
}

void Journal::write_all(const std::string& bytes) {
  const char* p = bytes.data();
  std::size_t left = bytes.size();
  while (left > 0) {
    const ssize_t n = ::write(fd_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("journal write failed", path_);
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  if (::fdatasync(fd_) != 0) io_fail("journal fsync failed", path_);
}

void Journal::append(const JournalEvent& ev) { append(std::span<const JournalEvent>(&ev, 1)); }

void Journal::append(std::span<const JournalEvent> events) {
  if (events.empty()) return;
  std::string bytes;
  std::int64_t expected = last_seq_ + 1;
  for (const JournalEvent& ev : events) {
    if (ev.seq != expected)
      throw Error(ErrorCode::SequenceGap, "seq " + std::to_string(ev.seq) + " after " +
                                              std::to_string(expected - 1));
    bytes += encode_event_line(ev);
    ++expected;
  }
  write_all(bytes);
  last_seq_ = expected - 1;
}

void Journal::reset() {
  if (::ftruncate(fd_, 0) != 0 || ::fsync(fd_) != 0) io_fail("cannot reset journal", path_);
  last_seq_ = 0;
}

}  // namespace resplab
