#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "resplab/config.hpp"

namespace httplib {
class Server;
}

namespace resplab {

enum class LabelStatus { Unlabeled, InProgress, Finalized };
std::string_view to_string(LabelStatus status);

struct FileEntry {
  std::string recording_id;  // path relative to the data root, without ".wav"
  std::string name;          // file name
  std::int64_t duration_ms = 0;
  std::map<std::string, LabelStatus> status;  // per user with label files
  std::map<std::string, std::map<std::string, std::int64_t>> label_counts;  // user -> class -> n
};

struct ServiceOptions {
  std::filesystem::path data_root;
  Config config;
  std::filesystem::path static_dir;  // served at "/" when non-empty
  std::size_t spectrogram_cache_entries = 32;
};

// HTTP/JSON annotation backend over one data root.
//
//   GET  /api/config
//   GET  /api/files                                   file list
//   POST /api/files?name=x.wav                        upload WAV bytes
//   GET  /api/files/{id}/audio
//   GET  /api/files/{id}/spectrogram?win&hop&window&floor_db&t0&t1&f0&f1
//   GET  /api/files/{id}/labels?user=
//   PUT  /api/files/{id}/labels?user=                 {base_revision, labels}
//   POST /api/files/{id}/labels/events?user=          {events: [...]}
//   POST /api/files/{id}/labels/finalize?user=
//   GET  /api/goldstandard?class=
//   POST /api/goldstandard
//   GET  /api/goldstandard/clips/{clip_id}.wav
//   POST /api/users                                   {user_id}
//
// Label writes for one (recording, user) go through a single journaled
// session that holds the on-disk writer lock until the service is destroyed.
class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  void mount(httplib::Server& server);

  // Blocks until the server stops.
  bool listen(const std::string& host, int port);

  std::vector<FileEntry> list_files() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace resplab
