#include "resplab/audio.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <optional>
#include <string_view>

#include "resplab/error.hpp"
#include "resplab/io.hpp"

namespace resplab {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

// KSDATAFORMAT_SUBTYPE_PCM, bytes 2.. of the GUID after the format tag.
constexpr std::array<std::uint8_t, 14> kPcmGuidTail = {0x00, 0x00, 0x00, 0x00, 0x10, 0x00, 0x80,
                                                       0x00, 0x00, 0xAA, 0x00, 0x38, 0x9B, 0x71};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t pos() const { return pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n)
      throw Error(ErrorCode::MalformedContainer, std::string("truncated ") + what);
  }

  std::string_view tag() {
    need(4, "chunk tag");
    std::string_view t(reinterpret_cast<const char*>(bytes_.data() + pos_), 4);
    pos_ += 4;
    return t;
  }

  std::uint32_t u32() {
    need(4, "field");
    const auto* p = bytes_.data() + pos_;
    pos_ += 4;
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
  }

  std::uint16_t u16() {
    need(2, "field");
    const auto* p = bytes_.data() + pos_;
    pos_ += 2;
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
  }

  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  void skip(std::size_t n) { pos_ += std::min(n, remaining()); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct FormatChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

FormatChunk parse_format(std::span<const std::uint8_t> body) {
  ByteReader r(body);
  if (body.size() < 16) throw Error(ErrorCode::MalformedContainer, "fmt chunk shorter than 16 bytes");
  FormatChunk f;
  f.format = r.u16();
  f.channels = r.u16();
  f.sample_rate = r.u32();
  r.u32();  // byte rate
  f.block_align = r.u16();
  f.bits = r.u16();
  if (f.format == kFormatExtensible) {
    if (body.size() < 40)
      throw Error(ErrorCode::MalformedContainer, "extensible fmt chunk shorter than 40 bytes");
    r.u16();  // cbSize
    r.u16();  // valid bits
    r.u32();  // channel mask
    const std::uint16_t sub = r.u16();
    auto tail = r.take(14, "subformat guid");
    if (sub != kFormatPcm || !std::equal(tail.begin(), tail.end(), kPcmGuidTail.begin()))
      throw Error(ErrorCode::UnsupportedEncoding, "extensible subformat is not integer PCM");
    f.format = kFormatPcm;
  }
  if (f.format != kFormatPcm)
    throw Error(ErrorCode::UnsupportedEncoding,
                "format tag " + std::to_string(f.format) + " is not integer PCM");
  if (f.bits != 8 && f.bits != 16 && f.bits != 24 && f.bits != 32)
    throw Error(ErrorCode::UnsupportedEncoding, std::to_string(f.bits) + "-bit PCM");
  if (f.channels == 0) throw Error(ErrorCode::MalformedContainer, "zero channels");
  if (f.sample_rate == 0) throw Error(ErrorCode::MalformedContainer, "zero sample rate");
  if (f.block_align != f.channels * (f.bits / 8))
    throw Error(ErrorCode::MalformedContainer, "block align does not match channels * bytes");
  return f;
}

double decode_sample(const std::uint8_t* p, int bits) {
  switch (bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16: {
      const auto v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
      return v / 32768.0;
    }
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    default: {
      const auto v = static_cast<std::int32_t>(static_cast<std::uint32_t>(p[0]) |
                                               (static_cast<std::uint32_t>(p[1]) << 8) |
                                               (static_cast<std::uint32_t>(p[2]) << 16) |
                                               (static_cast<std::uint32_t>(p[3]) << 24));
      return v / 2147483648.0;
    }
  }
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

std::int64_t duration_ms_for(std::size_t sample_count, int sample_rate) {
  return static_cast<std::int64_t>(sample_count) * 1000 / sample_rate;
}

Recording make_recording(std::string id, std::vector<double> samples, int sample_rate,
                         int bit_depth) {
  if (sample_rate <= 0) throw Error(ErrorCode::InvalidParams, "sample rate must be positive");
  for (double& s : samples) s = std::clamp(s, -1.0, 1.0);
  Recording rec;
  rec.id = std::move(id);
  rec.sample_rate = sample_rate;
  rec.bit_depth = bit_depth;
  rec.channels = 1;
  rec.duration_ms = duration_ms_for(samples.size(), sample_rate);
  rec.samples = std::move(samples);
  return rec;
}

Recording decode_wav(std::span<const std::uint8_t> bytes, std::string id,
                     std::string source_path) {
  ByteReader r(bytes);
  if (r.tag() != "RIFF") throw Error(ErrorCode::MalformedContainer, "missing RIFF tag");
  const std::uint32_t riff_size = r.u32();
  if (r.tag() != "WAVE") throw Error(ErrorCode::MalformedContainer, "RIFF form is not WAVE");
  if (riff_size < 4 || riff_size - 4 > r.remaining())
    throw Error(ErrorCode::MalformedContainer, "RIFF size exceeds file length");

  std::optional<FormatChunk> fmt;
  std::span<const std::uint8_t> data;
  bool have_data = false;
  while (r.remaining() >= 8) {
    const std::string_view tag = r.tag();
    const std::uint32_t size = r.u32();
    if (size > r.remaining())
      throw Error(ErrorCode::MalformedContainer,
                  "chunk '" + std::string(tag) + "' overruns the container");
    auto body = r.take(size, "chunk body");
    if (size % 2 == 1) r.skip(1);
    if (tag == "fmt ") {
      fmt = parse_format(body);
    } else if (tag == "data") {
      if (!fmt) throw Error(ErrorCode::MalformedContainer, "data chunk before fmt chunk");
      data = body;
      have_data = true;
      break;
    }
  }
  if (!fmt) throw Error(ErrorCode::MalformedContainer, "no fmt chunk");
  if (!have_data) throw Error(ErrorCode::MalformedContainer, "no data chunk");

  const std::size_t frame_bytes = fmt->block_align;
  const std::size_t frames = data.size() / frame_bytes;
  if (frames == 0) throw Error(ErrorCode::EmptyAudio, "data chunk holds no samples");

  Recording rec;
  rec.id = std::move(id);
  rec.source_path = std::move(source_path);
  rec.sample_rate = static_cast<int>(fmt->sample_rate);
  rec.bit_depth = fmt->bits;
  rec.channels = fmt->channels;
  rec.samples.resize(frames);
  const int bytes_per_sample = fmt->bits / 8;
  for (std::size_t i = 0; i < frames; ++i) {
    const std::uint8_t* frame = data.data() + i * frame_bytes;
    double sum = 0.0;
    for (int ch = 0; ch < fmt->channels; ++ch) sum += decode_sample(frame + ch * bytes_per_sample, fmt->bits);
    rec.samples[i] = fmt->channels == 1 ? sum : sum / fmt->channels;
  }
  rec.duration_ms = duration_ms_for(frames, rec.sample_rate);
  return rec;
}

Recording load_recording(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return decode_wav(bytes, path.stem().string(), path.string());
}

std::vector<SegmentRef> truncate_segments(const Recording& rec, std::int64_t segment_length_ms) {
  if (segment_length_ms <= 0)
    throw Error(ErrorCode::InvalidParams, "segment length must be positive");
  const std::int64_t count = rec.duration_ms / segment_length_ms;
  std::vector<SegmentRef> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i)
    out.push_back({rec.id, static_cast<std::size_t>(i), i * segment_length_ms,
                   (i + 1) * segment_length_ms});
  return out;
}

std::span<const double> sample_window(const Recording& rec, std::int64_t start_ms,
                                      std::int64_t end_ms) {
  if (start_ms < 0 || start_ms >= end_ms || end_ms > rec.duration_ms)
    throw Error(ErrorCode::OutOfRange, "window [" + std::to_string(start_ms) + ", " +
                                           std::to_string(end_ms) + ") outside [0, " +
                                           std::to_string(rec.duration_ms) + "]");
  const auto first = static_cast<std::size_t>(start_ms * rec.sample_rate / 1000);
  const auto last = static_cast<std::size_t>(end_ms * rec.sample_rate / 1000);
  return std::span<const double>(rec.samples).subspan(first, last - first);
}

std::vector<std::uint8_t> encode_wav16(std::span<const double> samples, int sample_rate) {
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(sample_rate));
  put_u32(out, static_cast<std::uint32_t>(sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (double s : samples) {
    const double scaled = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
    const auto v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    put_u16(out, static_cast<std::uint16_t>(v));
  }
  return out;
}

void write_wav16(const std::filesystem::path& path, std::span<const double> samples,
                 int sample_rate) {
  const auto bytes = encode_wav16(samples, sample_rate);
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace resplab
