#include "resplab/detector.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "resplab/error.hpp"
#include "resplab/fft.hpp"

namespace resplab {

namespace {

constexpr double kEnergyGuard = 1e-30;

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

void DetectorConfig::validate(int sample_rate) const {
  if (sample_rate <= 0) throw Error(ErrorCode::ConfigInvalid, "sample rate must be positive");
  const double nyquist = sample_rate / 2.0;
  if (!(band_low_hz >= 0.0 && band_low_hz < band_high_hz && band_high_hz <= nyquist))
    throw Error(ErrorCode::ConfigInvalid, "band must satisfy 0 <= low < high <= Nyquist (" +
                                              std::to_string(nyquist) + " Hz)");
  if (envelope_window_ms <= 0) throw Error(ErrorCode::ConfigInvalid, "envelope_window_ms must be positive");
  if (envelope_window_ms * sample_rate < 1000)
    throw Error(ErrorCode::ConfigInvalid, "envelope window shorter than one sample");
  if (!(threshold_k >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "threshold_k must be >= 0");
  if (min_event_ms <= 0) throw Error(ErrorCode::ConfigInvalid, "min_event_ms must be positive");
  if (merge_gap_ms < 0) throw Error(ErrorCode::ConfigInvalid, "merge_gap_ms must be >= 0");
}

std::vector<double> band_log_energy(std::span<const double> samples, int sample_rate,
                                    const DetectorConfig& cfg, std::vector<Interval>* windows) {
  cfg.validate(sample_rate);
  const auto window = static_cast<std::size_t>(cfg.envelope_window_ms * sample_rate / 1000);
  const std::size_t fft_size = next_power_of_two(window);
  const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(fft_size);

  std::vector<double> env;
  std::vector<std::complex<double>> buf(fft_size);
  if (windows) windows->clear();
  for (std::size_t start = 0; start < samples.size(); start += window) {
    const std::size_t len = std::min(window, samples.size() - start);
    std::fill(buf.begin(), buf.end(), std::complex<double>{});
    for (std::size_t i = 0; i < len; ++i) buf[i] = samples[start + i];
    fft_inplace(buf);
    double energy = 0.0;
    for (std::size_t k = 0; k <= fft_size / 2; ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      if (f < cfg.band_low_hz || f > cfg.band_high_hz) continue;
      const double weight = (k == 0 || k == fft_size / 2) ? 1.0 : 2.0;
      energy += weight * std::norm(buf[k]);
    }
    energy /= static_cast<double>(fft_size) * static_cast<double>(len);
    env.push_back(10.0 * std::log10(energy + kEnergyGuard));
    if (windows)
      windows->push_back({static_cast<std::int64_t>(start) * 1000 / sample_rate,
                          static_cast<std::int64_t>(start + len) * 1000 / sample_rate});
  }
  return env;
}

Detection detect_events(std::span<const double> samples, int sample_rate, const DetectorConfig& cfg) {
  cfg.validate(sample_rate);
  if (samples.empty()) throw Error(ErrorCode::ConfigInvalid, "no samples to analyse");

  Detection out;
  out.cls = cfg.emit_class;
  out.envelope_db = band_log_energy(samples, sample_rate, cfg, &out.windows);

  const double median = median_of(out.envelope_db);
  std::vector<double> deviation(out.envelope_db.size());
  std::transform(out.envelope_db.begin(), out.envelope_db.end(), deviation.begin(),
                 [&](double v) { return std::abs(v - median); });
  const double mad = median_of(std::move(deviation));
  out.threshold_db = median + cfg.threshold_k * mad;

  std::vector<Interval> runs;
  for (std::size_t i = 0; i < out.envelope_db.size(); ++i) {
    if (!(out.envelope_db[i] > out.threshold_db)) continue;
    const Interval& w = out.windows[i];
    if (!runs.empty() && runs.back().end_ms == w.start_ms)
      runs.back().end_ms = w.end_ms;
    else
      runs.push_back(w);
  }
  std::erase_if(runs, [&](const Interval& r) { return r.length() < cfg.min_event_ms; });

  for (const Interval& r : runs) {
    if (!out.events.empty() && r.start_ms - out.events.back().end_ms < cfg.merge_gap_ms)
      out.events.back().end_ms = r.end_ms;
    else
      out.events.push_back(r);
  }
  return out;
}

}  // namespace resplab
