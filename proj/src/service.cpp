#include "resplab/service.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <deque>
#include <limits>
#include <mutex>
#include <set>
#include <tuple>

#include "httplib.h"
#include "resplab/audio.hpp"
#include "resplab/error.hpp"
#include "resplab/gold_standard.hpp"
#include "resplab/io.hpp"
#include "resplab/label_codec.hpp"
#include "resplab/label_store.hpp"
#include "resplab/spectrogram.hpp"
#include "resplab/users.hpp"

namespace resplab {

namespace fs = std::filesystem;

std::string_view to_string(LabelStatus status) {
  switch (status) {
    case LabelStatus::Unlabeled: return "unlabeled";
    case LabelStatus::InProgress: return "in_progress";
    case LabelStatus::Finalized: return "finalized";
  }
  return "unlabeled";
}

namespace {

constexpr const char* kJsonType = "application/json";

std::string number_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// A request-level failure with its HTTP status and JSON body.
struct HttpError {
  int status;
  Json body;
};

[[noreturn]] void http_fail(int status, const std::string& message, Json extra = Json::object()) {
  extra["error"] = message;
  throw HttpError{status, std::move(extra)};
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::SequenceGap:
    case ErrorCode::Locked: return 409;
    case ErrorCode::InvalidParams:
    case ErrorCode::InvalidUserId:
    case ErrorCode::EmptyTile:
    case ErrorCode::TooShort: return 400;
    case ErrorCode::IoFailure:
    case ErrorCode::CorruptJournal: return 500;
    default: return 422;
  }
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJsonType);
}

bool is_wav_name(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".wav";
}

bool safe_relative_id(const std::string& id) {
  if (id.empty() || id.front() == '/') return false;
  for (const auto& part : fs::path(id)) {
    const std::string s = part.string();
    if (s == ".." || s == "." || s.empty()) return false;
  }
  return true;
}

double query_number(const httplib::Request& req, const char* key, double fallback) {
  if (!req.has_param(key)) return fallback;
  const std::string text = req.get_param_value(key);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
    http_fail(400, std::string("query parameter '") + key + "' is not a number");
  return v;
}

int query_int(const httplib::Request& req, const char* key, int fallback) {
  const double v = query_number(req, key, fallback);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    http_fail(400, std::string("query parameter '") + key + "' is not an integer");
  return static_cast<int>(v);
}

Json parse_body(const httplib::Request& req) {
  try {
    return Json::parse(req.body);
  } catch (const Json::parse_error& e) {
    http_fail(422, std::string("request body is not valid JSON: ") + e.what());
  }
}

Json entry_to_json(const GoldStandardEntry& e) {
  return Json{{"clip_id", e.clip_id},        {"recording_id", e.recording_id},
              {"start_ms", e.start_ms},      {"end_ms", e.end_ms},
              {"class", std::string(to_string(e.cls))},
              {"note", e.note},              {"stored_by", e.stored_by},
              {"stored_at", format_rfc3339(e.stored_at)}};
}

Json file_entry_to_json(const FileEntry& f) {
  Json status = Json::object();
  for (const auto& [user, s] : f.status) status[user] = std::string(to_string(s));
  return Json{{"recording_id", f.recording_id}, {"name", f.name},          {"duration_ms", f.duration_ms},
              {"status", status},               {"label_counts", f.label_counts}};
}

// Geometry-level equality used for PUT retry detection.
bool same_labels(const std::vector<Annotation>& a, const std::vector<Annotation>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].id != b[i].id || a[i].cls != b[i].cls || a[i].track_id != b[i].track_id ||
        a[i].start_ms != b[i].start_ms || a[i].end_ms != b[i].end_ms)
      return false;
  }
  return true;
}

bool same_edit(const JournalEvent& a, const JournalEvent& b) {
  if (a.op != b.op || a.label.id != b.label.id) return false;
  if (a.op == EditOp::Delete) return true;
  return a.label.cls == b.label.cls && a.label.track_id == b.label.track_id &&
         a.label.start_ms == b.label.start_ms && a.label.end_ms == b.label.end_ms;
}

struct SpectrogramKey {
  std::string recording_id;
  int window_size, hop_size;
  WindowFunction window_fn;
  double floor_db, epsilon;

  auto tie() const { return std::tie(recording_id, window_size, hop_size, window_fn, floor_db, epsilon); }
  bool operator==(const SpectrogramKey& o) const { return tie() == o.tie(); }
};

}  // namespace

struct Service::Impl {
  ServiceOptions opt;
  GoldStandardStore gold;
  UserRegistry users;

  mutable std::mutex recordings_mu;
  mutable std::map<std::string, std::shared_ptr<const Recording>> recordings;

  std::mutex spec_mu;
  std::deque<std::pair<SpectrogramKey, std::shared_ptr<const Spectrogram>>> spec_cache;

  struct Slot {
    std::mutex mu;
    std::unique_ptr<LabelSession> session;
  };
  mutable std::mutex sessions_mu;
  std::map<std::pair<std::string, std::string>, std::shared_ptr<Slot>> sessions;

  explicit Impl(ServiceOptions o)
      : opt(std::move(o)), gold(opt.data_root), users(opt.data_root) {}

  // --- recordings -------------------------------------------------------

  std::optional<fs::path> wav_path(const std::string& id) const {
    if (!safe_relative_id(id)) return std::nullopt;
    for (const char* ext : {".wav", ".WAV", ".Wav"}) {
      fs::path p = opt.data_root / (id + ext);
      std::error_code ec;
      if (fs::is_regular_file(p, ec)) return p;
    }
    return std::nullopt;
  }

  std::shared_ptr<const Recording> recording(const std::string& id) const {
    {
      std::lock_guard lock(recordings_mu);
      if (auto it = recordings.find(id); it != recordings.end()) return it->second;
    }
    const auto path = wav_path(id);
    if (!path) http_fail(404, "unknown recording '" + id + "'");
    auto rec = std::make_shared<Recording>(load_recording(*path));
    rec->id = id;
    std::lock_guard lock(recordings_mu);
    return recordings.emplace(id, std::move(rec)).first->second;
  }

  std::vector<std::pair<std::string, fs::path>> discover() const {
    std::vector<std::pair<std::string, fs::path>> out;
    std::error_code ec;
    if (!fs::is_directory(opt.data_root, ec))
      http_fail(500, "data root '" + opt.data_root.string() + "' is not readable");
    fs::recursive_directory_iterator it(opt.data_root, ec), end;
    if (ec) http_fail(500, "cannot read data root: " + ec.message());
    for (; it != end; it.increment(ec)) {
      if (ec) http_fail(500, "cannot read data root: " + ec.message());
      if (it->is_directory() && it->path().filename() == "goldstandard" && it.depth() == 0) {
        it.disable_recursion_pending();
        continue;
      }
      if (!it->is_regular_file() || !is_wav_name(it->path())) continue;
      fs::path rel = fs::relative(it->path(), opt.data_root);
      rel.replace_extension();
      out.emplace_back(rel.generic_string(), it->path());
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // --- label sessions ---------------------------------------------------

  std::string require_user(const httplib::Request& req) const {
    if (!req.has_param("user")) http_fail(400, "missing 'user' query parameter");
    const std::string user = req.get_param_value("user");
    if (!is_valid_user_id(user)) http_fail(400, "'" + user + "' is not a valid user id");
    return user;
  }

  std::shared_ptr<Slot> slot(const std::string& rec_id, const std::string& user) {
    std::lock_guard lock(sessions_mu);
    auto& s = sessions[{rec_id, user}];
    if (!s) s = std::make_shared<Slot>();
    return s;
  }

  std::shared_ptr<Slot> existing_slot(const std::string& rec_id, const std::string& user) const {
    std::lock_guard lock(sessions_mu);
    auto it = sessions.find({rec_id, user});
    return it == sessions.end() ? nullptr : it->second;
  }

  LabelSession& open_session(Slot& s, const std::string& rec_id, const std::string& user) {
    if (!s.session) {
      const auto rec = recording(rec_id);
      users.resolve_user(user);
      s.session = std::make_unique<LabelSession>(label_file_path(opt.data_root, rec_id, user), rec_id,
                                                 user, opt.config.layout, rec->duration_ms);
    }
    return *s.session;
  }

  // Current state without taking the writer lock.
  std::pair<AnnotationSet, std::int64_t> read_labels(const std::string& rec_id, const std::string& user) const {
    if (auto s = existing_slot(rec_id, user)) {
      std::lock_guard lock(s->mu);
      if (s->session) return {s->session->labels(), s->session->journal_seq()};
    }
    const auto rec = recording(rec_id);
    const fs::path file = label_file_path(opt.data_root, rec_id, user);
    AnnotationSet set = load_labels(file, rec_id, user, opt.config.layout, rec->duration_ms);
    const auto journal = read_journal(journal_path_for(file), user);
    return {std::move(set), journal.events.empty() ? 0 : journal.events.back().seq};
  }

  static Json labels_response(const AnnotationSet& set, std::int64_t journal_seq) {
    Json j = snapshot_to_json(set);
    j["journal_seq"] = journal_seq;
    return j;
  }

  void clear_finalized(const LabelSession& session) {
    std::error_code ec;
    fs::remove(finalized_marker_for(session.label_file()), ec);
  }

  // Normalizes a label object from a client: server-side defaults for id,
  // track and timestamps.
  Json complete_label(Json label) const {
    if (!label.is_object()) http_fail(422, "label must be an object");
    const std::string now = format_rfc3339(now_utc());
    if (!label.contains("id")) label["id"] = random_label_id();
    if (!label.contains("track") && label.contains("class") && label["class"].is_string()) {
      if (auto cls = try_parse_label_class(label["class"].get<std::string>()))
        if (auto track = opt.config.layout.track_for(*cls)) label["track"] = *track;
    }
    if (!label.contains("created_at")) label["created_at"] = now;
    if (!label.contains("updated_at")) label["updated_at"] = now;
    return label;
  }

  // --- handlers ---------------------------------------------------------

  void get_files(const httplib::Request&, httplib::Response& res) const {
    Json out = Json::array();
    for (const FileEntry& f : list_files()) out.push_back(file_entry_to_json(f));
    send_json(res, 200, out);
  }

  std::vector<FileEntry> list_files() const {
    std::vector<FileEntry> out;
    for (const auto& [id, path] : discover()) {
      FileEntry entry;
      entry.recording_id = id;
      entry.name = path.filename().string();
      try {
        entry.duration_ms = recording(id)->duration_ms;
      } catch (const Error&) {
        entry.duration_ms = 0;  // undecodable files are listed but cannot be labeled
      }
      const fs::path dir = opt.data_root / id;
      std::error_code ec;
      if (fs::is_directory(dir, ec)) {
        std::set<std::string> label_users;
        for (const auto& f : fs::directory_iterator(dir, ec)) {
          std::string name = f.path().filename().string();
          for (const char* suffix : {".labels.json", ".labels.json.journal"}) {
            if (name.ends_with(suffix)) {
              const std::string user = name.substr(0, name.size() - std::string_view(suffix).size());
              if (is_valid_user_id(user)) label_users.insert(user);
            }
          }
        }
        for (const std::string& user : label_users) {
          const fs::path file = label_file_path(opt.data_root, id, user);
          std::int64_t events = 0;
          std::map<std::string, std::int64_t> counts;
          try {
            const auto [set, seq] = read_labels(id, user);
            events = seq;
            for (const Annotation& a : set.annotations()) ++counts[std::string(to_string(a.cls))];
          } catch (const Error&) {
          } catch (const HttpError&) {
          }
          LabelStatus status = LabelStatus::Unlabeled;
          if (fs::exists(finalized_marker_for(file), ec))
            status = LabelStatus::Finalized;
          else if (events > 0)
            status = LabelStatus::InProgress;
          entry.status[user] = status;
          entry.label_counts[user] = counts;
        }
      }
      out.push_back(std::move(entry));
    }
    return out;
  }

  void post_file(const httplib::Request& req, httplib::Response& res) {
    std::string name;
    std::string bytes;
    if (req.is_multipart_form_data() && !req.files.empty()) {
      const auto& file = req.files.begin()->second;
      name = file.filename;
      bytes = file.content;
    } else {
      name = req.has_param("name") ? req.get_param_value("name") : "";
      bytes = req.body;
    }
    const fs::path base = fs::path(name).filename();
    if (base.empty() || base.string() != name || !is_wav_name(base) || name.front() == '.')
      http_fail(400, "upload needs a plain '*.wav' file name");
    const auto* data = reinterpret_cast<const std::uint8_t*>(bytes.data());
    decode_wav(std::span(data, bytes.size()), base.stem().string());
    const fs::path target = opt.data_root / base;
    std::error_code ec;
    if (fs::exists(target, ec)) http_fail(409, "'" + name + "' already exists");
    write_file_atomic(target, bytes);
    FileEntry entry;
    entry.recording_id = base.stem().string();
    entry.name = base.string();
    entry.duration_ms = recording(entry.recording_id)->duration_ms;
    send_json(res, 201, file_entry_to_json(entry));
  }

  void get_audio(const std::string& id, httplib::Response& res) const {
    const auto path = wav_path(id);
    if (!path) http_fail(404, "unknown recording '" + id + "'");
    res.status = 200;
    res.set_content(read_file_text(*path), "audio/wav");
  }

  void get_spectrogram(const std::string& id, const httplib::Request& req, httplib::Response& res) {
    SpectrogramParams p = opt.config.stft;
    p.window_size = query_int(req, "win", p.window_size);
    p.hop_size = query_int(req, "hop", p.hop_size);
    p.floor_db = query_number(req, "floor_db", p.floor_db);
    if (req.has_param("window")) p.window_fn = parse_window_function(req.get_param_value("window"));
    p.validate();
    const double inf = std::numeric_limits<double>::infinity();
    const double t0 = query_number(req, "t0", 0.0), t1 = query_number(req, "t1", inf);
    const double f0 = query_number(req, "f0", 0.0), f1 = query_number(req, "f1", inf);

    const auto rec = recording(id);
    const auto spec = spectrogram(*rec, p);
    const Tile tile = render_tile(*spec, t0, t1, f0, f1);

    res.status = 200;
    res.set_header("X-Bins", std::to_string(tile.rows()));
    res.set_header("X-Frames", std::to_string(tile.cols()));
    res.set_header("X-Bin-Begin", std::to_string(tile.bin_begin));
    res.set_header("X-Frame-Begin", std::to_string(tile.frame_begin));
    res.set_header("X-Total-Bins", std::to_string(spec->bins()));
    res.set_header("X-Total-Frames", std::to_string(spec->frames()));
    res.set_header("X-Db-Min", number_text(p.floor_db));
    res.set_header("X-Db-Max", "0");
    res.set_header("X-Hop-Ms", number_text(1000.0 * p.hop_size / rec->sample_rate));
    res.set_header("X-Bin-Hz", number_text(static_cast<double>(rec->sample_rate) / p.window_size));
    res.set_content(encode_pgm(tile), "image/x-portable-graymap");
  }

  std::shared_ptr<const Spectrogram> spectrogram(const Recording& rec, const SpectrogramParams& p) {
    const SpectrogramKey key{rec.id, p.window_size, p.hop_size, p.window_fn, p.floor_db, p.epsilon};
    {
      std::lock_guard lock(spec_mu);
      for (const auto& [k, v] : spec_cache)
        if (k == key) return v;
    }
    auto spec = std::make_shared<const Spectrogram>(compute_spectrogram(rec.samples, rec.sample_rate, p));
    std::lock_guard lock(spec_mu);
    spec_cache.emplace_back(key, spec);
    while (spec_cache.size() > std::max<std::size_t>(1, opt.spectrogram_cache_entries)) spec_cache.pop_front();
    return spec;
  }

  void get_labels(const std::string& id, const httplib::Request& req, httplib::Response& res) const {
    const std::string user = require_user(req);
    const auto [set, seq] = read_labels(id, user);
    send_json(res, 200, labels_response(set, seq));
  }

  void put_labels(const std::string& id, const httplib::Request& req, httplib::Response& res) {
    const std::string user = require_user(req);
    const Json body = parse_body(req);
    if (!body.is_object() || !body.contains("base_revision") || !body["base_revision"].is_number_integer())
      http_fail(422, "body needs an integer 'base_revision'");
    if (!body.contains("labels") || !body["labels"].is_array()) http_fail(422, "body needs a 'labels' array");
    const std::int64_t base_revision = body["base_revision"].get<std::int64_t>();

    const auto rec = recording(id);
    AnnotationSet wanted(id, user, opt.config.layout, rec->duration_ms);
    for (std::size_t i = 0; i < body["labels"].size(); ++i)
      wanted.insert_unchecked(annotation_from_json(complete_label(body["labels"][i]), user,
                                                   "labels[" + std::to_string(i) + "]"));
    if (const auto v = validate_set(wanted); !v.empty())
      http_fail(422, "labels violate set invariants", {{"violations", violations_to_json(v)}});

    auto s = slot(id, user);
    std::lock_guard lock(s->mu);
    LabelSession& session = open_session(*s, id, user);
    const AnnotationSet& current = session.labels();
    if (base_revision != current.revision()) {
      if (same_labels(current.annotations(), wanted.annotations())) {
        send_json(res, 200, labels_response(current, session.journal_seq()));
        return;
      }
      http_fail(409, "stale base_revision", {{"revision", current.revision()}});
    }

    const auto events = diff_events(current, wanted, session.journal_seq());
    session.append_events(events);
    if (!events.empty()) clear_finalized(session);
    send_json(res, 200, labels_response(session.labels(), session.journal_seq()));
  }

  // Edits turning `from` into `to`: deletes first, then resizes that fit
  // as they go, and finally delete+re-add for resizes that could only land
  // once their neighbours had moved.
  static std::vector<JournalEvent> diff_events(const AnnotationSet& from, const AnnotationSet& to,
                                               std::int64_t last_seq) {
    std::vector<JournalEvent> out;
    const Timestamp now = now_utc();
    AnnotationSet scratch = from;
    const auto emit = [&](EditOp op, Annotation a) {
      JournalEvent ev{last_seq + 1 + static_cast<std::int64_t>(out.size()), op, std::move(a), now, std::nullopt};
      scratch.apply(ev.edit());
      out.push_back(std::move(ev));
    };

    std::vector<Annotation> resizes, adds;
    for (const Annotation& a : from.annotations()) {
      const Annotation* b = to.find(a.id);
      if (!b || b->cls != a.cls || b->track_id != a.track_id) {
        emit(EditOp::Delete, a);
        if (b) adds.push_back(*b);
      } else if (b->start_ms != a.start_ms || b->end_ms != a.end_ms) {
        Annotation r = a;
        r.start_ms = b->start_ms;
        r.end_ms = b->end_ms;
        r.updated_at = now;
        resizes.push_back(r);
      }
    }
    for (const Annotation& b : to.annotations())
      if (!from.find(b.id)) adds.push_back(b);

    for (bool progress = true; progress && !resizes.empty();) {
      progress = false;
      for (auto it = resizes.begin(); it != resizes.end();) {
        try {
          AnnotationSet probe = scratch;
          probe.apply(Edit{EditOp::Resize, *it});
        } catch (const Error&) {
          ++it;
          continue;
        }
        emit(EditOp::Resize, *it);
        it = resizes.erase(it);
        progress = true;
      }
    }
    for (const Annotation& r : resizes) emit(EditOp::Delete, r);
    for (Annotation& r : resizes) adds.push_back(r);
    for (Annotation& a : adds) {
      a.created_at = a.created_at == Timestamp{} ? now : a.created_at;
      a.updated_at = now;
      emit(EditOp::Add, a);
    }
    return out;
  }

  void post_events(const std::string& id, const httplib::Request& req, httplib::Response& res) {
    const std::string user = require_user(req);
    const Json body = parse_body(req);
    const Json& list = body.is_array() ? body : (body.is_object() && body.contains("events") ? body["events"] : body);
    if (!list.is_array()) http_fail(422, "body needs an 'events' array");

    std::vector<JournalEvent> events;
    for (std::size_t i = 0; i < list.size(); ++i) {
      Json ev = list[i];
      if (ev.is_object() && ev.contains("label")) ev["label"] = complete_label(ev["label"]);
      try {
        events.push_back(event_from_json(ev, user));
      } catch (const Error& e) {
        http_fail(422, "events[" + std::to_string(i) + "]: " + e.what());
      }
    }

    auto s = slot(id, user);
    std::lock_guard lock(s->mu);
    LabelSession& session = open_session(*s, id, user);
    const std::int64_t stored = session.journal_seq();

    auto fresh = events.begin();
    if (fresh != events.end() && fresh->seq <= stored) {
      const auto journal = read_journal(journal_path_for(session.label_file()), user);
      for (; fresh != events.end() && fresh->seq <= stored; ++fresh) {
        const auto& done = journal.events;
        const auto idx = static_cast<std::size_t>(fresh->seq - 1);
        if (idx >= done.size() || !same_edit(done[idx], *fresh))
          http_fail(409, "seq " + std::to_string(fresh->seq) + " was already used for a different edit",
                    {{"journal_seq", stored}});
      }
    }
    const std::vector<JournalEvent> pending(fresh, events.end());
    try {
      session.append_events(pending);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SequenceGap) http_fail(409, e.what(), {{"journal_seq", stored}});
      throw;
    }
    if (!pending.empty()) clear_finalized(session);
    send_json(res, 200, Json{{"journal_seq", session.journal_seq()},
                             {"revision", session.labels().revision()},
                             {"appended", pending.size()}});
  }

  void finalize(const std::string& id, const httplib::Request& req, httplib::Response& res) {
    const std::string user = require_user(req);
    auto s = slot(id, user);
    std::lock_guard lock(s->mu);
    LabelSession& session = open_session(*s, id, user);
    session.compact();
    write_file_atomic(finalized_marker_for(session.label_file()), format_rfc3339(now_utc()) + "\n");
    send_json(res, 200, labels_response(session.labels(), session.journal_seq()));
  }

  void get_gold(const httplib::Request& req, httplib::Response& res) const {
    std::optional<LabelClass> cls;
    if (req.has_param("class")) {
      cls = try_parse_label_class(req.get_param_value("class"));
      if (!cls) http_fail(400, "unknown class '" + req.get_param_value("class") + "'");
    }
    Json out = Json::array();
    for (const auto& e : gold.list(cls)) out.push_back(entry_to_json(e));
    send_json(res, 200, Json{{"entries", out}});
  }

  void post_gold(const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    const std::string where = "body";
    const std::string rec_id = schema::string(body, "recording_id", where);
    const std::string user = schema::string(body, "user", where);
    users.resolve_user(user);
    const auto rec = recording(rec_id);
    const auto entry = gold.store(*rec, schema::integer(body, "start_ms", where),
                                  schema::integer(body, "end_ms", where),
                                  parse_label_class(schema::string(body, "class", where)),
                                  body.value("note", std::string()), user);
    send_json(res, 201, entry_to_json(entry));
  }

  void get_clip(const std::string& clip_id, httplib::Response& res) const {
    if (!is_valid_user_id(clip_id)) http_fail(404, "unknown clip");
    const fs::path p = gold.clip_path(clip_id);
    std::error_code ec;
    if (!fs::is_regular_file(p, ec)) http_fail(404, "unknown clip '" + clip_id + "'");
    res.status = 200;
    res.set_content(read_file_text(p), "audio/wav");
  }

  void post_user(const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    const auto rec = users.resolve_user(schema::string(body, "user_id", "body"));
    send_json(res, 200, Json{{"user_id", rec.user_id}, {"created_at", format_rfc3339(rec.created_at)}});
  }
};

namespace {

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const HttpError& e) {
      send_json(res, e.status, e.body);
    } catch (const Error& e) {
      send_json(res, status_for(e.code()), Json{{"error", e.what()}, {"code", std::string(to_string(e.code()))}});
    } catch (const std::exception& e) {
      send_json(res, 500, Json{{"error", e.what()}});
    }
  };
}

}  // namespace

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service() = default;

std::vector<FileEntry> Service::list_files() const { return impl_->list_files(); }

void Service::mount(httplib::Server& server) {
  Impl* m = impl_.get();
  server.Get("/api/config", guarded([m](const auto&, auto& res) {
               send_json(res, 200, config_to_json(m->opt.config));
             }));
  server.Get("/api/files", guarded([m](const auto& req, auto& res) { m->get_files(req, res); }));
  server.Post("/api/files", guarded([m](const auto& req, auto& res) { m->post_file(req, res); }));
  server.Get(R"(/api/files/(.+)/audio)",
             guarded([m](const auto& req, auto& res) { m->get_audio(req.matches[1], res); }));
  server.Get(R"(/api/files/(.+)/spectrogram)",
             guarded([m](const auto& req, auto& res) { m->get_spectrogram(req.matches[1], req, res); }));
  server.Post(R"(/api/files/(.+)/labels/events)",
              guarded([m](const auto& req, auto& res) { m->post_events(req.matches[1], req, res); }));
  server.Post(R"(/api/files/(.+)/labels/finalize)",
              guarded([m](const auto& req, auto& res) { m->finalize(req.matches[1], req, res); }));
  server.Get(R"(/api/files/(.+)/labels)",
             guarded([m](const auto& req, auto& res) { m->get_labels(req.matches[1], req, res); }));
  server.Put(R"(/api/files/(.+)/labels)",
             guarded([m](const auto& req, auto& res) { m->put_labels(req.matches[1], req, res); }));
  server.Get("/api/goldstandard", guarded([m](const auto& req, auto& res) { m->get_gold(req, res); }));
  server.Post("/api/goldstandard", guarded([m](const auto& req, auto& res) { m->post_gold(req, res); }));
  server.Get(R"(/api/goldstandard/clips/([A-Za-z0-9]+)\.wav)",
             guarded([m](const auto& req, auto& res) { m->get_clip(req.matches[1], res); }));
  server.Post("/api/users", guarded([m](const auto& req, auto& res) { m->post_user(req, res); }));

  std::error_code ec;
  if (!m->opt.static_dir.empty() && fs::is_directory(m->opt.static_dir, ec)) {
    server.set_mount_point("/", m->opt.static_dir.string());
  } else {
    server.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("resplab annotation service; API under /api/\n", "text/plain");
    });
  }
}

bool Service::listen(const std::string& host, int port) {
  httplib::Server server;
  mount(server);
  return server.listen(host, port);
}

}  // namespace resplab
