#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"
#include "resplab/annotation.hpp"
#include "resplab/spectrogram.hpp"

namespace resplab {

struct ClassStyle {
  std::string color;   // "#rrggbb"
  std::string hotkey;  // exactly one character

  friend bool operator==(const ClassStyle&, const ClassStyle&) = default;
};

std::map<LabelClass, ClassStyle> default_class_styles();

struct Config {
  SpectrogramParams stft;
  TrackLayout layout = TrackLayout::default_layout();
  std::map<LabelClass, ClassStyle> class_styles = default_class_styles();
  std::int64_t autosave_interval_ms = 2000;
  std::string data_root = ".";
  std::int64_t segment_length_ms = 15000;

  // Document the config was parsed from; keys the schema does not know are
  // written back untouched by save_config.
  nlohmann::ordered_json source = nlohmann::ordered_json::object();

  // Known fields only.
  bool same_settings(const Config& other) const;
};

// Missing optional keys take defaults. Throws SchemaViolation with the
// dotted field path.
Config config_from_json(const nlohmann::ordered_json& doc);
nlohmann::ordered_json config_to_json(const Config& cfg);

Config load_config(const std::filesystem::path& path);  // also IoFailure
void save_config(const Config& cfg, const std::filesystem::path& path);

}  // namespace resplab
