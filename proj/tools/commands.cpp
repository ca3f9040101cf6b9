#include "commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "resplab/audio.hpp"
#include "resplab/config.hpp"
#include "resplab/detector.hpp"
#include "resplab/error.hpp"
#include "resplab/io.hpp"
#include "resplab/metrics.hpp"
#include "resplab/predictions.hpp"
#include "resplab/service.hpp"
#include "resplab/spectrogram.hpp"
#include "resplab/stats.hpp"

namespace resplab::cli {

namespace fs = std::filesystem;

namespace {

void emit(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-")
    std::cout << content;
  else
    write_file_atomic(out, content);
}

Config config_or_default(const std::string& path) {
  return path.empty() ? Config{} : load_config(path);
}

struct ServeArgs {
  std::string root, config, static_dir, host = "127.0.0.1";
  int port = 8080;
};

int serve(const ServeArgs& a) {
  Config cfg = config_or_default(a.config);
  std::string root = a.root;
  if (root.empty()) {
    if (const char* env = std::getenv("RESPLAB_ROOT")) root = env;
  }
  if (root.empty()) root = cfg.data_root;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(ErrorCode::IoFailure, "data root '" + root + "' is not a directory");
  cfg.data_root = root;
  Service service(ServiceOptions{root, cfg, a.static_dir});
  std::cerr << "serving " << root << " on http://" << a.host << ":" << a.port << "\n";
  if (!service.listen(a.host, a.port))
    throw Error(ErrorCode::IoFailure, "cannot listen on " + a.host + ":" + std::to_string(a.port));
  return kExitOk;
}

struct StatsArgs {
  std::string labels, out;
  double recording_seconds = 15.0;
};

int stats(const StatsArgs& a) {
  const auto table = dataset_stats_from_dir(a.labels, static_cast<std::int64_t>(std::llround(a.recording_seconds * 1000)));
  for (const auto& s : table.skipped) std::cerr << "skipped " << s << "\n";
  emit(a.out, stats_to_csv(table));
  return kExitOk;
}

struct EvalArgs {
  std::string ref, pred, out, mode = "segment";
  std::int64_t frame_ms = 50;
  double min_iou = 0.5;
  bool by_group = false;
  std::int64_t horizon_ms = 0;
};

LabelCorpus load_any(const std::string& path) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) return load_prediction_dir(path);
  if (!fs::exists(path, ec)) throw Error(ErrorCode::IoFailure, "'" + path + "' does not exist");
  return load_prediction_file(path);
}

int eval(const EvalArgs& a) {
  EvalConfig cfg;
  if (a.mode == "segment")
    cfg.mode = EvalMode::Segment;
  else if (a.mode == "event")
    cfg.mode = EvalMode::Event;
  else
    throw Error(ErrorCode::ConfigInvalid, "--mode must be 'segment' or 'event'");
  cfg.frame_ms = a.frame_ms;
  cfg.match_min_iou = a.min_iou;
  cfg.class_mapping = a.by_group ? ClassMapping::ByGroup : ClassMapping::ExactClass;

  const LabelCorpus ref = load_any(a.ref);
  const LabelCorpus pred = load_any(a.pred);
  std::map<std::string, std::int64_t> horizons;
  if (a.horizon_ms > 0) {
    for (const auto& [id, _] : ref) horizons[id] = a.horizon_ms;
    for (const auto& [id, _] : pred) horizons[id] = a.horizon_ms;
  }
  emit(a.out, report_to_csv(evaluate(ref, pred, cfg, horizons)));
  return kExitOk;
}

struct SpectrogramArgs {
  std::string input, out, format, config, window;
  int win = 0, hop = 0;
  double floor_db = 0.0;
};

int spectrogram(const SpectrogramArgs& a) {
  SpectrogramParams p = config_or_default(a.config).stft;
  if (a.win) p.window_size = a.win;
  if (a.hop) p.hop_size = a.hop;
  if (a.floor_db != 0.0) p.floor_db = a.floor_db;
  if (!a.window.empty()) p.window_fn = parse_window_function(a.window);
  const Recording rec = load_recording(a.input);
  const Spectrogram spec = compute_spectrogram(rec.samples, rec.sample_rate, p);
  std::string format = a.format;
  if (format.empty()) format = fs::path(a.out).extension() == ".pgm" ? "pgm" : "csv";
  if (format != "csv" && format != "pgm") throw Error(ErrorCode::InvalidParams, "--format must be csv or pgm");
  export_matrix(spec, a.out, format == "pgm" ? MatrixFormat::Pgm : MatrixFormat::Csv);
  std::cout << spec.bins() << " bins x " << spec.frames() << " frames -> " << a.out << "\n";
  return kExitOk;
}

struct TruncateArgs {
  std::string input, out;
  double seconds = 15.0;
};

int truncate(const TruncateArgs& a) {
  if (!(a.seconds > 0)) throw Error(ErrorCode::InvalidParams, "--seconds must be positive");
  const Recording rec = load_recording(a.input);
  const auto segments = truncate_segments(rec, static_cast<std::int64_t>(std::llround(a.seconds * 1000)));
  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create '" + a.out + "'");
  for (const SegmentRef& seg : segments) {
    char name[64];
    std::snprintf(name, sizeof name, "_%03zu.wav", seg.index);
    write_wav16(fs::path(a.out) / (rec.id + name), sample_window(rec, seg.start_ms, seg.end_ms), rec.sample_rate);
  }
  std::cout << segments.size() << " segments -> " << a.out << "\n";
  return kExitOk;
}

struct DetectArgs {
  std::string input, out, cls = "inspiration";
  DetectorConfig cfg;
};

int detect(DetectArgs a) {
  a.cfg.emit_class = parse_label_class(a.cls);
  const Recording rec = load_recording(a.input);
  const Detection d = detect_events(rec.samples, rec.sample_rate, a.cfg);
  LabelCorpus corpus;
  corpus[rec.id][d.cls] = d.events;
  emit(a.out, encode_prediction_csv(corpus));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Respiratory sound annotation toolkit", "resplab"};
  app.require_subcommand(1);

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Run the annotation HTTP service");
  serve_cmd->add_option("--root", serve_args.root, "Data root (default: $RESPLAB_ROOT, then config data_root)");
  serve_cmd->add_option("--port", serve_args.port, "TCP port");
  serve_cmd->add_option("--host", serve_args.host, "Bind address");
  serve_cmd->add_option("--config", serve_args.config, "JSON configuration file");
  serve_cmd->add_option("--static", serve_args.static_dir, "Directory of UI assets served at /");

  StatsArgs stats_args;
  auto* stats_cmd = app.add_subcommand("stats", "Label statistics over a directory of label files");
  stats_cmd->add_option("--labels", stats_args.labels, "Directory searched for *.labels.json")->required();
  stats_cmd->add_option("--out", stats_args.out, "Output CSV (default stdout)");
  stats_cmd->add_option("--recording-seconds", stats_args.recording_seconds, "Duration counted per label file");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against reference labels");
  eval_cmd->add_option("--ref", eval_args.ref, "Reference label directory or file")->required();
  eval_cmd->add_option("--pred", eval_args.pred, "Prediction CSV/snapshot file or directory")->required();
  eval_cmd->add_option("--mode", eval_args.mode, "segment | event");
  eval_cmd->add_option("--frame-ms", eval_args.frame_ms, "Segment frame length");
  eval_cmd->add_option("--min-iou", eval_args.min_iou, "Event match threshold");
  eval_cmd->add_flag("--by-group", eval_args.by_group, "Fold continuous/discontinuous subtypes into cas/das");
  eval_cmd->add_option("--horizon-ms", eval_args.horizon_ms, "Segment horizon per recording (default: latest label end)");
  eval_cmd->add_option("--out", eval_args.out, "Output CSV (default stdout)");

  SpectrogramArgs spec_args;
  auto* spec_cmd = app.add_subcommand("spectrogram", "Export a dB spectrogram as CSV or PGM");
  spec_cmd->add_option("file", spec_args.input, "Input WAV")->required();
  spec_cmd->add_option("--out", spec_args.out, "Output path (.csv or .pgm)")->required();
  spec_cmd->add_option("--format", spec_args.format, "csv | pgm (default from extension)");
  spec_cmd->add_option("--config", spec_args.config, "Take STFT defaults from this config");
  spec_cmd->add_option("--win", spec_args.win, "Window size (samples)");
  spec_cmd->add_option("--hop", spec_args.hop, "Hop size (samples)");
  spec_cmd->add_option("--window", spec_args.window, "hann | hamming | rectangular");
  spec_cmd->add_option("--floor-db", spec_args.floor_db, "dB floor");

  TruncateArgs trunc_args;
  auto* trunc_cmd = app.add_subcommand("truncate", "Cut a recording into fixed-length WAV segments");
  trunc_cmd->add_option("file", trunc_args.input, "Input WAV")->required();
  trunc_cmd->add_option("--seconds", trunc_args.seconds, "Segment length");
  trunc_cmd->add_option("--out", trunc_args.out, "Output directory")->required();

  DetectArgs det_args;
  auto* det_cmd = app.add_subcommand("detect", "Energy-envelope event detection to prediction CSV");
  det_cmd->add_option("file", det_args.input, "Input WAV")->required();
  det_cmd->add_option("--out", det_args.out, "Output CSV (default stdout)");
  det_cmd->add_option("--class", det_args.cls, "Class written for each event");
  det_cmd->add_option("--band-low", det_args.cfg.band_low_hz, "Band lower edge (Hz)");
  det_cmd->add_option("--band-high", det_args.cfg.band_high_hz, "Band upper edge (Hz)");
  det_cmd->add_option("--window-ms", det_args.cfg.envelope_window_ms, "Envelope window");
  det_cmd->add_option("--k", det_args.cfg.threshold_k, "Threshold in MADs above the median");
  det_cmd->add_option("--min-event-ms", det_args.cfg.min_event_ms, "Shortest event kept");
  det_cmd->add_option("--merge-gap-ms", det_args.cfg.merge_gap_ms, "Gaps shorter than this are merged");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*serve_cmd) return serve(serve_args);
    if (*stats_cmd) return stats(stats_args);
    if (*eval_cmd) return eval(eval_args);
    if (*spec_cmd) return spectrogram(spec_args);
    if (*trunc_cmd) return truncate(trunc_args);
    if (*det_cmd) return detect(det_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::IoFailure ? kExitIo : kExitValidation;
  }
  return kExitValidation;
}

}  // namespace resplab::cli
