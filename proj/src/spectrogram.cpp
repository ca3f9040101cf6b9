#include "resplab/spectrogram.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "resplab/error.hpp"
#include "resplab/fft.hpp"
#include "resplab/io.hpp"

namespace resplab {

std::string_view to_string(WindowFunction fn) {
  switch (fn) {
    case WindowFunction::Hann: return "hann";
    case WindowFunction::Hamming: return "hamming";
    case WindowFunction::Rectangular: return "rectangular";
  }
  return "hann";
}

WindowFunction parse_window_function(std::string_view name) {
  if (name == "hann") return WindowFunction::Hann;
  if (name == "hamming") return WindowFunction::Hamming;
  if (name == "rectangular") return WindowFunction::Rectangular;
  throw Error(ErrorCode::InvalidParams, "unknown window function '" + std::string(name) + "'");
}

void SpectrogramParams::validate() const {
  if (window_size < 2 || !is_power_of_two(static_cast<std::size_t>(window_size)))
    throw Error(ErrorCode::InvalidParams, "window_size must be a power of two >= 2");
  if (hop_size <= 0 || hop_size > window_size)
    throw Error(ErrorCode::InvalidParams, "hop_size must satisfy 0 < hop_size <= window_size");
  if (!(floor_db < 0.0)) throw Error(ErrorCode::InvalidParams, "floor_db must be negative");
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidParams, "epsilon must be positive");
}

std::vector<double> make_window(WindowFunction fn, int n) {
  std::vector<double> w(static_cast<std::size_t>(n), 1.0);
  const double step = 2.0 * std::numbers::pi / n;
  for (int i = 0; i < n; ++i) {
    switch (fn) {
      case WindowFunction::Hann: w[i] = 0.5 - 0.5 * std::cos(step * i); break;
      case WindowFunction::Hamming: w[i] = 0.54 - 0.46 * std::cos(step * i); break;
      case WindowFunction::Rectangular: break;
    }
  }
  return w;
}

std::size_t frame_count(std::size_t sample_count, int window_size, int hop_size) {
  const auto n = static_cast<std::size_t>(window_size);
  if (sample_count < n) return 0;
  return (sample_count - n) / static_cast<std::size_t>(hop_size) + 1;
}

std::vector<std::vector<double>> frame_magnitudes(std::span<const double> samples,
                                                  const SpectrogramParams& params) {
  params.validate();
  const auto n = static_cast<std::size_t>(params.window_size);
  if (samples.size() < n)
    throw Error(ErrorCode::TooShort, std::to_string(samples.size()) + " samples, window needs " +
                                         std::to_string(n));
  const auto window = make_window(params.window_fn, params.window_size);
  const std::size_t frames = frame_count(samples.size(), params.window_size, params.hop_size);
  const std::size_t bins = n / 2 + 1;

  std::vector<std::vector<double>> out(frames, std::vector<double>(bins));
  std::vector<std::complex<double>> buf(n);
  for (std::size_t t = 0; t < frames; ++t) {
    const auto frame = samples.subspan(t * static_cast<std::size_t>(params.hop_size), n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = frame[i] * window[i];
    fft_inplace(buf);
    for (std::size_t k = 0; k < bins; ++k) out[t][k] = std::abs(buf[k]);
  }
  return out;
}

Spectrogram compute_spectrogram(std::span<const double> samples, int sample_rate,
                                const SpectrogramParams& params) {
  if (sample_rate <= 0) throw Error(ErrorCode::InvalidParams, "sample rate must be positive");
  const auto mags = frame_magnitudes(samples, params);
  const auto window = make_window(params.window_fn, params.window_size);
  const double scale = 2.0 / std::accumulate(window.begin(), window.end(), 0.0);

  Spectrogram spec;
  spec.params = params;
  spec.sample_rate = sample_rate;
  const std::size_t frames = mags.size();
  const std::size_t bins = static_cast<std::size_t>(params.window_size) / 2 + 1;
  spec.frame_times_ms.resize(frames);
  for (std::size_t t = 0; t < frames; ++t)
    spec.frame_times_ms[t] = 1000.0 * static_cast<double>(t * params.hop_size) / sample_rate;
  spec.bin_freqs_hz.resize(bins);
  for (std::size_t k = 0; k < bins; ++k)
    spec.bin_freqs_hz[k] = static_cast<double>(k) * sample_rate / params.window_size;

  spec.values_db.resize(bins * frames);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t k = 0; k < bins; ++k) {
      const double db = 20.0 * std::log10(scale * mags[t][k] + params.epsilon);
      spec.values_db[k * frames + t] = std::max(params.floor_db, db);
    }
  }
  return spec;
}

Tile render_tile(const Spectrogram& spec, double t0_ms, double t1_ms, double f0_hz, double f1_hz) {
  const auto in_range = [](const std::vector<double>& axis, double lo, double hi) {
    const auto first = std::lower_bound(axis.begin(), axis.end(), lo);
    const auto last = std::lower_bound(first, axis.end(), hi);
    return std::pair{static_cast<std::size_t>(first - axis.begin()),
                     static_cast<std::size_t>(last - axis.begin())};
  };
  const auto [fb, fe] = in_range(spec.frame_times_ms, t0_ms, t1_ms);
  const auto [bb, be] = in_range(spec.bin_freqs_hz, f0_hz, f1_hz);
  if (fb >= fe || bb >= be || !(t0_ms < t1_ms) || !(f0_hz < f1_hz))
    throw Error(ErrorCode::EmptyTile, "requested range does not intersect the spectrogram");

  Tile tile;
  tile.bin_begin = bb;
  tile.bin_end = be;
  tile.frame_begin = fb;
  tile.frame_end = fe;
  tile.floor_db = spec.params.floor_db;
  tile.values_db.reserve(tile.rows() * tile.cols());
  for (std::size_t k = bb; k < be; ++k)
    for (std::size_t t = fb; t < fe; ++t) tile.values_db.push_back(spec.at(k, t));
  return tile;
}

Tile full_tile(const Spectrogram& spec) {
  Tile tile;
  tile.bin_end = spec.bins();
  tile.frame_end = spec.frames();
  tile.floor_db = spec.params.floor_db;
  tile.values_db = spec.values_db;
  return tile;
}

std::uint8_t graymap_level(double value_db, double floor_db) {
  const double level = std::round(255.0 * (value_db - floor_db) / (0.0 - floor_db));
  return static_cast<std::uint8_t>(std::clamp(level, 0.0, 255.0));
}

std::string encode_pgm(const Tile& tile) {
  std::string out = "P5\n" + std::to_string(tile.cols()) + " " + std::to_string(tile.rows()) + "\n255\n";
  out.reserve(out.size() + tile.values_db.size());
  for (double v : tile.values_db) out.push_back(static_cast<char>(graymap_level(v, tile.floor_db)));
  return out;
}

std::string encode_csv(const Spectrogram& spec) {
  const auto& p = spec.params;
  char head[256];
  std::snprintf(head, sizeof head,
                "# window_size=%d,hop_size=%d,window_fn=%s,floor_db=%.6f,epsilon=%g,sample_rate=%d,"
                "bins=%zu,frames=%zu\n",
                p.window_size, p.hop_size, std::string(to_string(p.window_fn)).c_str(), p.floor_db,
                p.epsilon, spec.sample_rate, spec.bins(), spec.frames());
  std::string out = head;
  char cell[48];
  for (std::size_t k = 0; k < spec.bins(); ++k) {
    for (std::size_t t = 0; t < spec.frames(); ++t) {
      std::snprintf(cell, sizeof cell, t == 0 ? "%.6f" : ",%.6f", spec.at(k, t));
      out += cell;
    }
    out += '\n';
  }
  return out;
}

void export_matrix(const Spectrogram& spec, const std::filesystem::path& path, MatrixFormat format) {
  write_file_atomic(path, format == MatrixFormat::Csv ? encode_csv(spec) : encode_pgm(full_tile(spec)));
}

}  // namespace resplab
