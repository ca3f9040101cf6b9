#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "resplab/annotation.hpp"

namespace resplab {

struct Interval {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;

  std::int64_t length() const { return end_ms - start_ms; }
  friend auto operator<=>(const Interval&, const Interval&) = default;
};

std::int64_t overlap_ms(const Interval& a, const Interval& b);

using ClassIntervals = std::map<LabelClass, std::vector<Interval>>;
using LabelCorpus = std::map<std::string, ClassIntervals>;  // keyed by recording id

LabelCorpus corpus_from_set(const AnnotationSet& set);

enum class EvalMode { Segment, Event };
enum class ClassMapping { ExactClass, ByGroup };

struct EvalConfig {
  EvalMode mode = EvalMode::Segment;
  std::int64_t frame_ms = 50;   // segment mode
  double match_min_iou = 0.5;   // event mode
  ClassMapping class_mapping = ClassMapping::ExactClass;

  void validate() const;  // throws ConfigInvalid
};

struct Counts {
  std::int64_t tp = 0, fp = 0, fn = 0;

  // False when the target is absent from both sides.
  bool defined() const { return tp + fp + fn > 0; }
  double precision() const { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp); }
  double recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn); }
  double f1() const { return 2 * tp + fp + fn == 0 ? 0.0 : 2.0 * tp / (2.0 * tp + fp + fn); }

  Counts& operator+=(const Counts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const Counts&, const Counts&) = default;
};

struct TargetScore {
  std::string target;  // class name, or "cas"/"das" under by-group mapping
  Counts counts;
};

struct EvalReport {
  EvalConfig config;
  std::vector<TargetScore> rows;

  const Counts* find(std::string_view target) const;
};

// Frames [i*frame, (i+1)*frame) covering [0, horizon); a frame is positive on
// a side when an interval of that side overlaps it by more than zero ms.
// Throws InvalidHorizon if horizon <= 0 or an interval leaves [0, horizon].
Counts segment_counts(std::span<const Interval> ref, std::span<const Interval> pred,
                      std::int64_t horizon_ms, std::int64_t frame_ms);

// One-to-one matching over pairs with IoU >= min_iou. Pairs are taken
// greedily in descending IoU (ties: earlier reference start, then earlier
// prediction start), then extended along augmenting paths so the number of
// matches is always maximal. Returns (ref index, pred index) pairs sorted
// by ref index.
std::vector<std::pair<std::size_t, std::size_t>> match_events(std::span<const Interval> ref,
                                                              std::span<const Interval> pred,
                                                              double min_iou);
Counts event_counts(std::span<const Interval> ref, std::span<const Interval> pred, double min_iou);

// Single-target reports.
EvalReport segment_f1(std::span<const Interval> ref, std::span<const Interval> pred,
                      std::int64_t horizon_ms, const EvalConfig& cfg, const std::string& target = "all");
EvalReport event_f1(std::span<const Interval> ref, std::span<const Interval> pred,
                    const EvalConfig& cfg, const std::string& target = "all");

// Scoring target for a class. Under ByGroup the continuous classes fold
// into "cas" and discontinuous into "das"; phase and noise classes keep
// their own names.
std::string target_for(LabelClass cls, ClassMapping mapping);
std::vector<std::string> all_targets(ClassMapping mapping);

// Counts summed over recordings, one row per target. Segment-mode horizons
// come from `horizons_ms`, falling back to the latest end time seen for
// that recording on either side.
EvalReport evaluate(const LabelCorpus& ref, const LabelCorpus& pred, const EvalConfig& cfg,
                    const std::map<std::string, std::int64_t>& horizons_ms = {});

// "target,tp,fp,fn,precision,recall,f1"; undefined targets print "undefined"
// in the ratio columns.
std::string report_to_csv(const EvalReport& report);

}  // namespace resplab
