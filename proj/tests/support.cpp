#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>

namespace resplab::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  std::random_device rd;
  path_ = fs::temp_directory_path() / ("resplab-test-" + std::to_string(rd()) + std::to_string(rd()));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

namespace {

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(v & 0xFF);
  out.push_back(v >> 8);
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xFF);
}

}  // namespace

std::vector<std::uint8_t> wav_bytes(std::uint16_t format_tag, std::uint16_t channels, std::uint32_t rate,
                                    std::uint16_t bits, const std::vector<std::uint8_t>& data) {
  std::vector<std::uint8_t> out;
  const auto tag = [&](const char* t) { out.insert(out.end(), t, t + 4); };
  const std::uint16_t block = static_cast<std::uint16_t>(channels * ((bits + 7) / 8));
  tag("RIFF");
  put32(out, static_cast<std::uint32_t>(36 + data.size() + data.size() % 2));
  tag("WAVE");
  tag("fmt ");
  put32(out, 16);
  put16(out, format_tag);
  put16(out, channels);
  put32(out, rate);
  put32(out, rate * block);
  put16(out, block);
  put16(out, bits);
  tag("data");
  put32(out, static_cast<std::uint32_t>(data.size()));
  out.insert(out.end(), data.begin(), data.end());
  if (data.size() % 2) out.push_back(0);
  return out;
}

std::vector<std::uint8_t> wav16_bytes(std::uint16_t channels, std::uint32_t rate,
                                      const std::vector<std::int16_t>& samples) {
  std::vector<std::uint8_t> data;
  for (std::int16_t s : samples) put16(data, static_cast<std::uint16_t>(s));
  return wav_bytes(1, channels, rate, 16, data);
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<double> sine(double freq_hz, double amplitude, int sample_rate, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / sample_rate);
  return x;
}

std::vector<double> naive_dft_magnitudes(std::span<const double> frame, std::span<const double> window) {
  const std::size_t n = frame.size();
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  std::vector<long double> cos_t(n), sin_t(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long double angle = two_pi * static_cast<long double>(i) / static_cast<long double>(n);
    cos_t[i] = std::cos(angle);
    sin_t[i] = std::sin(angle);
    v[i] = static_cast<long double>(frame[i]) * window[i];
  }
  std::vector<double> mags(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    long double re = 0.0L, im = 0.0L;
    std::size_t phase = 0;  // k * t mod n
    for (std::size_t t = 0; t < n; ++t) {
      re += v[t] * cos_t[phase];
      im -= v[t] * sin_t[phase];
      phase += k;
      if (phase >= n) phase -= n;
    }
    mags[k] = static_cast<double>(std::sqrt(re * re + im * im));
  }
  return mags;
}

Counts enumerate_segment_counts(const std::vector<Interval>& ref, const std::vector<Interval>& pred,
                                std::int64_t horizon_ms, std::int64_t frame_ms) {
  Counts c;
  for (std::int64_t lo = 0; lo < horizon_ms; lo += frame_ms) {
    const Interval frame{lo, lo + frame_ms};
    const auto hits = [&](const std::vector<Interval>& side) {
      for (const Interval& iv : side)
        if (iv.start_ms < frame.end_ms && frame.start_ms < iv.end_ms) return true;
      return false;
    };
    const bool r = hits(ref), p = hits(pred);
    if (r && p) ++c.tp;
    if (!r && p) ++c.fp;
    if (r && !p) ++c.fn;
  }
  return c;
}

std::int64_t exhaustive_max_matching(const std::vector<Interval>& ref, const std::vector<Interval>& pred,
                                     double min_iou) {
  const auto eligible = [&](std::size_t i, std::size_t j) {
    const std::int64_t inter =
        std::max<std::int64_t>(0, std::min(ref[i].end_ms, pred[j].end_ms) - std::max(ref[i].start_ms, pred[j].start_ms));
    if (inter == 0) return false;
    const std::int64_t uni = ref[i].length() + pred[j].length() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni) >= min_iou;
  };
  std::vector<char> used(pred.size(), 0);
  std::function<std::int64_t(std::size_t)> best = [&](std::size_t i) -> std::int64_t {
    if (i == ref.size()) return 0;
    std::int64_t result = best(i + 1);  // leave ref i unmatched
    for (std::size_t j = 0; j < pred.size(); ++j) {
      if (used[j] || !eligible(i, j)) continue;
      used[j] = 1;
      result = std::max(result, 1 + best(i + 1));
      used[j] = 0;
    }
    return result;
  };
  return best(0);
}

std::vector<Interval> random_intervals(std::mt19937_64& rng, int max_count, std::int64_t horizon_ms,
                                       std::int64_t grid_ms, bool disjoint) {
  std::uniform_int_distribution<int> count_dist(0, max_count);
  const std::int64_t cells = horizon_ms / grid_ms;
  std::uniform_int_distribution<std::int64_t> cell(0, cells - 1);
  std::vector<Interval> out;
  const int count = count_dist(rng);
  int attempts = 0;
  while (static_cast<int>(out.size()) < count && attempts++ < 200) {
    std::int64_t a = cell(rng), b = cell(rng);
    if (a > b) std::swap(a, b);
    const Interval iv{a * grid_ms, (b + 1) * grid_ms};
    if (disjoint && std::any_of(out.begin(), out.end(), [&](const Interval& o) {
          return iv.start_ms < o.end_ms && o.start_ms < iv.end_ms;
        }))
      continue;
    out.push_back(iv);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void make_deterministic(AnnotationSet& set, std::uint64_t seed) {
  auto counter = std::make_shared<std::uint64_t>(seed * 1000000);
  set.set_id_generator([counter] { return "id" + std::to_string((*counter)++); });
  auto tick = std::make_shared<std::int64_t>(1'760'000'000'000);
  set.set_clock([tick] { return Timestamp{std::chrono::milliseconds(*tick += 7)}; });
}

}  // namespace resplab::testing
