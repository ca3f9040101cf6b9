#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "resplab/annotation.hpp"
#include "resplab/metrics.hpp"

namespace resplab {

// Energy-envelope event detector. A pipeline stand-in, not a respiratory
// sound classifier.
struct DetectorConfig {
  double band_low_hz = 100.0;
  double band_high_hz = 1800.0;
  std::int64_t envelope_window_ms = 50;
  double threshold_k = 3.0;  // multiples of the median absolute deviation
  std::int64_t min_event_ms = 100;
  std::int64_t merge_gap_ms = 50;
  LabelClass emit_class = LabelClass::Inspiration;

  void validate(int sample_rate) const;  // throws ConfigInvalid
};

struct Detection {
  LabelClass cls = LabelClass::Inspiration;
  std::vector<Interval> events;  // sorted, disjoint, each >= min_event_ms

  // Diagnostics: per-window band log-energy (dB) and the adaptive threshold.
  std::vector<Interval> windows;
  std::vector<double> envelope_db;
  double threshold_db = 0.0;
};

// Consecutive non-overlapping windows of envelope_window_ms; a final partial
// window is kept. Each value is 10*log10 of the mean band energy per sample.
std::vector<double> band_log_energy(std::span<const double> samples, int sample_rate,
                                    const DetectorConfig& cfg, std::vector<Interval>* windows = nullptr);

// Windows above median + k * MAD are active; active runs shorter than
// min_event_ms are dropped, then gaps shorter than merge_gap_ms are closed.
Detection detect_events(std::span<const double> samples, int sample_rate, const DetectorConfig& cfg);

}  // namespace resplab
