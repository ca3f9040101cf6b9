#include "resplab/gold_standard.hpp"

#include "resplab/error.hpp"
#include "resplab/io.hpp"
#include "resplab/label_codec.hpp"

namespace resplab {

namespace fs = std::filesystem;

namespace {

Json entry_to_json(const GoldStandardEntry& e) {
  return Json{{"clip_id", e.clip_id},        {"recording_id", e.recording_id},
              {"start_ms", e.start_ms},      {"end_ms", e.end_ms},
              {"class", std::string(to_string(e.cls))},
              {"note", e.note},              {"stored_by", e.stored_by},
              {"stored_at", format_rfc3339(e.stored_at)}};
}

GoldStandardEntry entry_from_json(const Json& j, const std::string& where) {
  GoldStandardEntry e;
  e.clip_id = schema::string(j, "clip_id", where);
  e.recording_id = schema::string(j, "recording_id", where);
  e.start_ms = schema::integer(j, "start_ms", where);
  e.end_ms = schema::integer(j, "end_ms", where);
  e.cls = parse_label_class(schema::string(j, "class", where));
  e.note = schema::string(j, "note", where);
  e.stored_by = schema::string(j, "stored_by", where);
  e.stored_at = parse_rfc3339(schema::string(j, "stored_at", where));
  return e;
}

std::vector<GoldStandardEntry> read_index(const fs::path& index) {
  std::vector<GoldStandardEntry> out;
  std::error_code ec;
  if (!fs::exists(index, ec)) return out;
  Json doc;
  try {
    doc = Json::parse(read_file_text(index));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, index.string() + ": " + e.what());
  }
  const Json& entries = schema::field(doc, "entries", "index");
  if (!entries.is_array()) schema::fail("index.entries", "expected an array");
  for (std::size_t i = 0; i < entries.size(); ++i)
    out.push_back(entry_from_json(entries[i], "index.entries[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

GoldStandardStore::GoldStandardStore(fs::path data_root) : dir_(std::move(data_root) / "goldstandard") {}

fs::path GoldStandardStore::clip_path(const std::string& clip_id) const {
  return dir_ / "clips" / (clip_id + ".wav");
}

GoldStandardEntry GoldStandardStore::store(const Recording& rec, std::int64_t start_ms,
                                           std::int64_t end_ms, LabelClass cls,
                                           const std::string& note, const std::string& user) {
  const auto clip = sample_window(rec, start_ms, end_ms);  // OutOfRange

  GoldStandardEntry entry;
  entry.clip_id = random_label_id();
  entry.recording_id = rec.id;
  entry.start_ms = start_ms;
  entry.end_ms = end_ms;
  entry.cls = cls;
  entry.note = note;
  entry.stored_by = user;
  entry.stored_at = now_utc();

  std::error_code ec;
  fs::create_directories(dir_ / "clips", ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + (dir_ / "clips").string());
  write_wav16(clip_path(entry.clip_id), clip, rec.sample_rate);

  FileLock lock(dir_ / ".lock", FileLock::Mode::Wait);
  auto entries = read_index(dir_ / "index.json");
  entries.push_back(entry);
  Json arr = Json::array();
  for (const auto& e : entries) arr.push_back(entry_to_json(e));
  write_file_atomic(dir_ / "index.json", Json{{"version", 1}, {"entries", arr}}.dump(2) + "\n");
  return entry;
}

std::vector<GoldStandardEntry> GoldStandardStore::list(std::optional<LabelClass> cls) const {
  auto entries = read_index(dir_ / "index.json");
  if (cls) std::erase_if(entries, [&](const GoldStandardEntry& e) { return e.cls != *cls; });
  return entries;
}

}  // namespace resplab
