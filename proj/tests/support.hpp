#pragma once

// Test-only helpers: scratch directories, WAV byte builders, and the
// independent oracles that expected values are checked against.

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "resplab/annotation.hpp"
#include "resplab/metrics.hpp"

namespace resplab::testing {

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Raw RIFF/WAVE bytes with an arbitrary format tag and pre-encoded data.
std::vector<std::uint8_t> wav_bytes(std::uint16_t format_tag, std::uint16_t channels, std::uint32_t rate,
                                    std::uint16_t bits, const std::vector<std::uint8_t>& data);
// 16-bit PCM, samples given as raw integers, interleaved.
std::vector<std::uint8_t> wav16_bytes(std::uint16_t channels, std::uint32_t rate,
                                      const std::vector<std::int16_t>& samples);
void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

std::vector<double> sine(double freq_hz, double amplitude, int sample_rate, std::size_t n);

// Naive O(N^2) DFT magnitudes of one frame, one-sided, in long double with
// exactly reduced twiddle angles.
std::vector<double> naive_dft_magnitudes(std::span<const double> frame, std::span<const double> window);

// Segment scoring by enumerating frames one at a time and testing every
// interval against each frame.
Counts enumerate_segment_counts(const std::vector<Interval>& ref, const std::vector<Interval>& pred,
                                std::int64_t horizon_ms, std::int64_t frame_ms);

// Maximum cardinality matching over all assignments (exponential; small
// inputs only), restricted to pairs with IoU >= min_iou.
std::int64_t exhaustive_max_matching(const std::vector<Interval>& ref, const std::vector<Interval>& pred,
                                     double min_iou);

// Random intervals on a coarse grid inside [0, horizon). With
// `disjoint` the intervals do not overlap each other.
std::vector<Interval> random_intervals(std::mt19937_64& rng, int max_count, std::int64_t horizon_ms,
                                       std::int64_t grid_ms, bool disjoint);

// Deterministic per-test clock and id generator for AnnotationSet.
void make_deterministic(AnnotationSet& set, std::uint64_t seed = 1);

}  // namespace resplab::testing
