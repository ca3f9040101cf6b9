#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace resplab {

inline constexpr std::int64_t kDefaultSegmentLengthMs = 15000;

// Decoded, mono-mixed audio. Immutable once built; all times are integer ms.
struct Recording {
  std::string id;
  std::string source_path;
  int sample_rate = 0;
  int bit_depth = 0;
  int channels = 1;
  std::int64_t duration_ms = 0;
  std::vector<double> samples;  // normalized to [-1, 1]

  std::size_t sample_count() const { return samples.size(); }
};

struct SegmentRef {
  std::string recording_id;
  std::size_t index = 0;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;

  friend bool operator==(const SegmentRef&, const SegmentRef&) = default;
};

// floor(1000 * sample_count / sample_rate)
std::int64_t duration_ms_for(std::size_t sample_count, int sample_rate);

// Builds a Recording from already-normalized samples (clamped to [-1, 1]).
Recording make_recording(std::string id, std::vector<double> samples, int sample_rate,
                         int bit_depth = 16);

// RIFF/WAVE with integer PCM (8/16/24/32 bit). Multi-channel input is
// averaged to mono. Throws MalformedContainer, UnsupportedEncoding or
// EmptyAudio; IoFailure when the file cannot be read.
Recording load_recording(const std::filesystem::path& path);
Recording decode_wav(std::span<const std::uint8_t> bytes, std::string id,
                     std::string source_path = {});

// Contiguous fixed-length segments from t = 0; a shorter tail is dropped.
std::vector<SegmentRef> truncate_segments(const Recording& rec,
                                          std::int64_t segment_length_ms = kDefaultSegmentLengthMs);

// Samples with indices [floor(start_ms*fs/1000), floor(end_ms*fs/1000)).
// Throws OutOfRange unless 0 <= start_ms < end_ms <= duration_ms.
std::span<const double> sample_window(const Recording& rec, std::int64_t start_ms,
                                      std::int64_t end_ms);

// 16-bit little-endian mono PCM.
std::vector<std::uint8_t> encode_wav16(std::span<const double> samples, int sample_rate);
void write_wav16(const std::filesystem::path& path, std::span<const double> samples,
                 int sample_rate);

}  // namespace resplab
