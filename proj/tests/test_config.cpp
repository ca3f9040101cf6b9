#include <string>

#include "doctest.h"
#include "resplab/config.hpp"
#include "resplab/error.hpp"
#include "resplab/io.hpp"
#include "support.hpp"

using namespace resplab;
using OJson = nlohmann::ordered_json;

namespace {

std::string violation_text(const OJson& doc) {
  try {
    config_from_json(doc);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaViolation);
    return e.what();
  }
  FAIL("expected SchemaViolation");
  return {};
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("missing blocks take defaults") {
  const Config cfg = config_from_json(OJson::parse(R"({"data_root": "/data"})"));
  CHECK(cfg.stft == SpectrogramParams{});
  CHECK(cfg.layout == TrackLayout::default_layout());
  CHECK(cfg.class_styles == default_class_styles());
  CHECK(cfg.autosave_interval_ms == 2000);
  CHECK(cfg.segment_length_ms == 15000);
  CHECK(cfg.data_root == "/data");
}

TEST_CASE("save then load keeps settings and unknown keys") {
  testing::TempDir dir;
  Config cfg = config_from_json(OJson::parse(R"({"theme": {"dark": true}, "stft": {"window_size": 512, "hop_size": 128, "window_fn": "hamming", "floor_db": -50}})"));
  CHECK(cfg.stft.window_size == 512);
  CHECK(cfg.stft.window_fn == WindowFunction::Hamming);
  cfg.autosave_interval_ms = 500;
  save_config(cfg, dir / "c.json");
  const Config back = load_config(dir / "c.json");
  CHECK(back.same_settings(cfg));
  CHECK(back.source["theme"]["dark"] == true);
}

TEST_CASE("custom track layout") {
  const Config cfg = config_from_json(OJson::parse(R"({"layout": {"tracks": [
    {"track_id": 7, "name": "all", "allowed_classes": ["normal","inspiration","expiration","wheeze","stridor",
      "rhonchus","discontinuous","nbc","continuous","noise"]}]}})"));
  REQUIRE(cfg.layout.tracks.size() == 1);
  CHECK(cfg.layout.track_for(LabelClass::Noise) == 7);
  CHECK(violation_text(OJson::parse(R"({"layout": {"tracks": [{"track_id": 0, "allowed_classes": ["wheeze"]}]}})"))
            .find("config.layout") != std::string::npos);
}

TEST_CASE("duplicate hotkey names both classes") {
  const std::string msg = violation_text(OJson::parse(R"({"class_styles": {"stridor": {"hotkey": "w"}}})"));
  CHECK(msg.find("wheeze") != std::string::npos);
  CHECK(msg.find("stridor") != std::string::npos);
}

TEST_CASE("field paths in violations") {
  CHECK(violation_text(OJson::parse(R"({"stft": {"hop_size": 1024}})")).find("config.stft") != std::string::npos);
  CHECK(violation_text(OJson::parse(R"({"stft": {"window_fn": "kaiser"}})")).find("config.stft.window_fn") != std::string::npos);
  CHECK(violation_text(OJson::parse(R"({"autosave_interval_ms": 10})")).find("autosave_interval_ms") != std::string::npos);
  CHECK(violation_text(OJson::parse(R"({"class_styles": {"crackle": {}}})")).find("config.class_styles.crackle") != std::string::npos);
  CHECK(violation_text(OJson::parse(R"({"class_styles": {"wheeze": {"color": "red"}}})")).find("color") != std::string::npos);
  CHECK(violation_text(OJson::parse("[1, 2]")).find("config") != std::string::npos);
}

TEST_CASE("unreadable and invalid files") {
  testing::TempDir dir;
  try {
    load_config(dir / "missing.json");
    FAIL("expected IoFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoFailure);
  }
  write_file_atomic(dir / "bad.json", "{not json");
  try {
    load_config(dir / "bad.json");
    FAIL("expected SchemaViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaViolation);
  }
}

}  // TEST_SUITE
