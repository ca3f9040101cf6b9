#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace resplab {

enum class WindowFunction { Hann, Hamming, Rectangular };

std::string_view to_string(WindowFunction fn);
WindowFunction parse_window_function(std::string_view name);  // throws InvalidParams

struct SpectrogramParams {
  int window_size = 256;  // samples, power of two
  int hop_size = 64;      // samples, 0 < hop <= window
  WindowFunction window_fn = WindowFunction::Hann;
  double floor_db = -80.0;
  double epsilon = 1e-12;

  // Throws Error(InvalidParams) naming the offending field.
  void validate() const;

  friend bool operator==(const SpectrogramParams&, const SpectrogramParams&) = default;
};

// Periodic (DFT-even) window of length n.
std::vector<double> make_window(WindowFunction fn, int n);

struct Spectrogram {
  SpectrogramParams params;
  int sample_rate = 0;
  std::vector<double> frame_times_ms;  // start time of each frame
  std::vector<double> bin_freqs_hz;    // window_size / 2 + 1 entries
  std::vector<double> values_db;       // row-major, bins x frames

  std::size_t bins() const { return bin_freqs_hz.size(); }
  std::size_t frames() const { return frame_times_ms.size(); }
  double at(std::size_t bin, std::size_t frame) const { return values_db[bin * frames() + frame]; }
};

// floor((sample_count - window) / hop) + 1, or 0 when the signal is shorter
// than one window.
std::size_t frame_count(std::size_t sample_count, int window_size, int hop_size);

// Linear one-sided magnitudes |X_t[k]| of each windowed frame, frame-major
// (frames x bins). This is the pre-dB quantity that compute_spectrogram
// normalizes and logs.
std::vector<std::vector<double>> frame_magnitudes(std::span<const double> samples,
                                                  const SpectrogramParams& params);

// dB(k) = max(floor_db, 20 log10(2 |X_t[k]| / sum(w) + epsilon)). A full-scale
// bin-centred sine peaks at 0 dB. Throws TooShort or InvalidParams.
Spectrogram compute_spectrogram(std::span<const double> samples, int sample_rate,
                                const SpectrogramParams& params);

struct Tile {
  std::size_t bin_begin = 0, bin_end = 0;
  std::size_t frame_begin = 0, frame_end = 0;
  double floor_db = 0.0;
  std::vector<double> values_db;  // row-major; rows ascend in frequency

  std::size_t rows() const { return bin_end - bin_begin; }
  std::size_t cols() const { return frame_end - frame_begin; }
  double at(std::size_t row, std::size_t col) const { return values_db[row * cols() + col]; }
};

// Bins with f0 <= freq < f1 and frames with t0 <= start time < t1.
// Throws EmptyTile when nothing falls inside.
Tile render_tile(const Spectrogram& spec, double t0_ms, double t1_ms, double f0_hz, double f1_hz);
Tile full_tile(const Spectrogram& spec);

// Linear in dB: floor_db -> 0, 0 dB -> 255, clamped beyond both ends.
std::uint8_t graymap_level(double value_db, double floor_db);

// Binary PGM (P5), one image row per frequency bin, lowest bin first.
std::string encode_pgm(const Tile& tile);

// "# window_size=...,..." header followed by one row per bin (ascending),
// one column per frame, six decimals.
std::string encode_csv(const Spectrogram& spec);

enum class MatrixFormat { Csv, Pgm };
void export_matrix(const Spectrogram& spec, const std::filesystem::path& path, MatrixFormat format);

}  // namespace resplab
