#include "resplab/config.hpp"

#include <cctype>
#include <set>

#include "resplab/error.hpp"
#include "resplab/io.hpp"

namespace resplab {

using OJson = nlohmann::ordered_json;

namespace {

[[noreturn]] void violation(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, path + ": " + what);
}

const OJson* member(const OJson& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::int64_t get_int(const OJson& obj, const char* key, const std::string& path, std::int64_t fallback) {
  const OJson* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) violation(path + "." + key, "expected an integer");
  return v->get<std::int64_t>();
}

double get_number(const OJson& obj, const char* key, const std::string& path, double fallback) {
  const OJson* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) violation(path + "." + key, "expected a number");
  return v->get<double>();
}

std::string get_string(const OJson& obj, const char* key, const std::string& path,
                       const std::string& fallback) {
  const OJson* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) violation(path + "." + key, "expected a string");
  return v->get<std::string>();
}

const OJson& require_object(const OJson& v, const std::string& path) {
  if (!v.is_object()) violation(path, "expected an object");
  return v;
}

bool is_hex_color(const std::string& s) {
  if (s.size() != 7 || s[0] != '#') return false;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!std::isxdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

SpectrogramParams parse_stft(const OJson& obj, const std::string& path) {
  require_object(obj, path);
  SpectrogramParams p;
  p.window_size = static_cast<int>(get_int(obj, "window_size", path, p.window_size));
  p.hop_size = static_cast<int>(get_int(obj, "hop_size", path, p.hop_size));
  const std::string fn = get_string(obj, "window_fn", path, std::string(to_string(p.window_fn)));
  try {
    p.window_fn = parse_window_function(fn);
  } catch (const Error&) {
    violation(path + ".window_fn", "unknown window function '" + fn + "'");
  }
  p.floor_db = get_number(obj, "floor_db", path, p.floor_db);
  p.epsilon = get_number(obj, "epsilon", path, p.epsilon);
  try {
    p.validate();
  } catch (const Error& e) {
    violation(path, e.what());
  }
  return p;
}

TrackLayout parse_layout(const OJson& obj, const std::string& path) {
  require_object(obj, path);
  const OJson* tracks = member(obj, "tracks");
  if (!tracks || !tracks->is_array()) violation(path + ".tracks", "expected an array");
  TrackLayout layout;
  for (std::size_t i = 0; i < tracks->size(); ++i) {
    const std::string tp = path + ".tracks[" + std::to_string(i) + "]";
    const OJson& t = require_object((*tracks)[i], tp);
    Track track;
    const OJson* id = member(t, "track_id");
    if (!id || !id->is_number_integer()) violation(tp + ".track_id", "expected an integer");
    track.track_id = id->get<int>();
    track.name = get_string(t, "name", tp, "track" + std::to_string(track.track_id));
    const OJson* classes = member(t, "allowed_classes");
    if (!classes || !classes->is_array()) violation(tp + ".allowed_classes", "expected an array");
    for (std::size_t k = 0; k < classes->size(); ++k) {
      const OJson& c = (*classes)[k];
      const auto cls = c.is_string() ? try_parse_label_class(c.get<std::string>()) : std::nullopt;
      if (!cls) violation(tp + ".allowed_classes[" + std::to_string(k) + "]", "unknown label class");
      track.allowed_classes.push_back(*cls);
    }
    layout.tracks.push_back(std::move(track));
  }
  if (auto problem = layout.check()) violation(path, *problem);
  return layout;
}

std::map<LabelClass, ClassStyle> parse_styles(const OJson& obj, const std::string& path) {
  require_object(obj, path);
  auto styles = default_class_styles();
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string cp = path + "." + it.key();
    const auto cls = try_parse_label_class(it.key());
    if (!cls) violation(cp, "unknown label class");
    require_object(it.value(), cp);
    ClassStyle& style = styles[*cls];
    style.color = get_string(it.value(), "color", cp, style.color);
    style.hotkey = get_string(it.value(), "hotkey", cp, style.hotkey);
    if (!is_hex_color(style.color)) violation(cp + ".color", "expected #rrggbb");
    if (style.hotkey.size() != 1) violation(cp + ".hotkey", "expected a single character");
  }
  std::map<std::string, LabelClass> owner;
  for (const auto& [cls, style] : styles) {
    auto [pos, inserted] = owner.emplace(style.hotkey, cls);
    if (!inserted)
      violation(path, "hotkey '" + style.hotkey + "' assigned to both '" +
                          std::string(to_string(pos->second)) + "' and '" +
                          std::string(to_string(cls)) + "'");
  }
  return styles;
}

OJson stft_to_json(const SpectrogramParams& p) {
  return OJson{{"window_size", p.window_size},
               {"hop_size", p.hop_size},
               {"window_fn", std::string(to_string(p.window_fn))},
               {"floor_db", p.floor_db},
               {"epsilon", p.epsilon}};
}

OJson layout_to_json(const TrackLayout& layout) {
  OJson tracks = OJson::array();
  for (const Track& t : layout.tracks) {
    OJson classes = OJson::array();
    for (LabelClass c : t.allowed_classes) classes.push_back(std::string(to_string(c)));
    tracks.push_back({{"track_id", t.track_id}, {"name", t.name}, {"allowed_classes", classes}});
  }
  return OJson{{"tracks", tracks}};
}

}  // namespace

std::map<LabelClass, ClassStyle> default_class_styles() {
  using C = LabelClass;
  return {
      {C::Normal, {"#9e9e9e", "n"}},        {C::Inspiration, {"#1f77b4", "i"}},
      {C::Expiration, {"#2ca02c", "e"}},    {C::Wheeze, {"#d62728", "w"}},
      {C::Stridor, {"#9467bd", "s"}},       {C::Rhonchus, {"#8c564b", "r"}},
      {C::Discontinuous, {"#ff7f0e", "d"}}, {C::Nbc, {"#17becf", "b"}},
      {C::Continuous, {"#e377c2", "c"}},    {C::Noise, {"#7f7f7f", "x"}},
  };
}

bool Config::same_settings(const Config& other) const {
  return stft == other.stft && layout == other.layout && class_styles == other.class_styles &&
         autosave_interval_ms == other.autosave_interval_ms && data_root == other.data_root &&
         segment_length_ms == other.segment_length_ms;
}

Config config_from_json(const OJson& doc) {
  const std::string root = "config";
  require_object(doc, root);
  Config cfg;
  cfg.source = doc;
  if (const OJson* v = member(doc, "stft")) cfg.stft = parse_stft(*v, root + ".stft");
  if (const OJson* v = member(doc, "layout")) cfg.layout = parse_layout(*v, root + ".layout");
  if (const OJson* v = member(doc, "class_styles")) cfg.class_styles = parse_styles(*v, root + ".class_styles");
  cfg.autosave_interval_ms = get_int(doc, "autosave_interval_ms", root, cfg.autosave_interval_ms);
  if (cfg.autosave_interval_ms < 100) violation(root + ".autosave_interval_ms", "must be >= 100");
  cfg.data_root = get_string(doc, "data_root", root, cfg.data_root);
  cfg.segment_length_ms = get_int(doc, "segment_length_ms", root, cfg.segment_length_ms);
  if (cfg.segment_length_ms <= 0) violation(root + ".segment_length_ms", "must be positive");
  return cfg;
}

OJson config_to_json(const Config& cfg) {
  OJson styles = OJson::object();
  for (const auto& [cls, style] : cfg.class_styles)
    styles[std::string(to_string(cls))] = {{"color", style.color}, {"hotkey", style.hotkey}};
  const OJson known{{"stft", stft_to_json(cfg.stft)},
                    {"layout", layout_to_json(cfg.layout)},
                    {"class_styles", styles},
                    {"autosave_interval_ms", cfg.autosave_interval_ms},
                    {"data_root", cfg.data_root},
                    {"segment_length_ms", cfg.segment_length_ms}};
  OJson out = cfg.source.is_object() ? cfg.source : OJson::object();
  out.merge_patch(known);
  return out;
}

Config load_config(const std::filesystem::path& path) {
  const std::string text = read_file_text(path);
  OJson doc;
  try {
    doc = OJson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    violation("config", std::string("not valid JSON: ") + e.what());
  }
  return config_from_json(doc);
}

void save_config(const Config& cfg, const std::filesystem::path& path) {
  write_file_atomic(path, config_to_json(cfg).dump(2) + "\n");
}

}  // namespace resplab
