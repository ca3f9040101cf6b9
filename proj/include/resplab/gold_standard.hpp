#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "resplab/annotation.hpp"
#include "resplab/audio.hpp"

namespace resplab {

struct GoldStandardEntry {
  std::string clip_id;
  std::string recording_id;
  std::int64_t start_ms = 0;  // within the source recording
  std::int64_t end_ms = 0;
  LabelClass cls = LabelClass::Normal;
  std::string note;
  std::string stored_by;
  Timestamp stored_at{};

  std::int64_t duration_ms() const { return end_ms - start_ms; }

  friend bool operator==(const GoldStandardEntry&, const GoldStandardEntry&) = default;
};

// Exemplar clips under "<root>/goldstandard/": clips/<clip_id>.wav plus
// index.json. Index updates are serialized through a store-wide lock file.
class GoldStandardStore {
 public:
  explicit GoldStandardStore(std::filesystem::path data_root);

  const std::filesystem::path& directory() const { return dir_; }
  std::filesystem::path clip_path(const std::string& clip_id) const;

  // Copies [start_ms, end_ms) of `rec` as a 16-bit WAV clip. OutOfRange for
  // intervals outside the recording, IoFailure on write errors.
  GoldStandardEntry store(const Recording& rec, std::int64_t start_ms, std::int64_t end_ms,
                          LabelClass cls, const std::string& note, const std::string& user);

  std::vector<GoldStandardEntry> list(std::optional<LabelClass> cls = std::nullopt) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace resplab
