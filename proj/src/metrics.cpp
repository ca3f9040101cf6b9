#include "resplab/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>

#include "resplab/error.hpp"

namespace resplab {

std::int64_t overlap_ms(const Interval& a, const Interval& b) {
  return std::max<std::int64_t>(0, std::min(a.end_ms, b.end_ms) - std::max(a.start_ms, b.start_ms));
}

LabelCorpus corpus_from_set(const AnnotationSet& set) {
  LabelCorpus corpus;
  auto& by_class = corpus[set.recording_id()];
  for (const Annotation& a : set.annotations()) by_class[a.cls].push_back({a.start_ms, a.end_ms});
  for (auto& [cls, list] : by_class) std::sort(list.begin(), list.end());
  return corpus;
}

void EvalConfig::validate() const {
  if (frame_ms <= 0) throw Error(ErrorCode::ConfigInvalid, "frame_ms must be positive");
  if (!(match_min_iou > 0.0 && match_min_iou <= 1.0))
    throw Error(ErrorCode::ConfigInvalid, "match_min_iou must lie in (0, 1]");
}

const Counts* EvalReport::find(std::string_view target) const {
  for (const TargetScore& r : rows)
    if (r.target == target) return &r.counts;
  return nullptr;
}

Counts segment_counts(std::span<const Interval> ref, std::span<const Interval> pred,
                      std::int64_t horizon_ms, std::int64_t frame_ms) {
  if (frame_ms <= 0) throw Error(ErrorCode::ConfigInvalid, "frame_ms must be positive");
  if (horizon_ms <= 0) throw Error(ErrorCode::InvalidHorizon, "horizon must be positive");
  const std::int64_t frames = (horizon_ms + frame_ms - 1) / frame_ms;

  const auto mark = [&](std::span<const Interval> side) {
    std::vector<char> active(static_cast<std::size_t>(frames), 0);
    for (const Interval& iv : side) {
      if (iv.start_ms < 0 || iv.end_ms > horizon_ms || iv.start_ms > iv.end_ms)
        throw Error(ErrorCode::InvalidHorizon,
                    "interval [" + std::to_string(iv.start_ms) + ", " + std::to_string(iv.end_ms) +
                        ") outside horizon " + std::to_string(horizon_ms));
      if (iv.start_ms == iv.end_ms) continue;
      const std::int64_t first = iv.start_ms / frame_ms;
      const std::int64_t last = (iv.end_ms + frame_ms - 1) / frame_ms;  // exclusive
      std::fill(active.begin() + first, active.begin() + last, 1);
    }
    return active;
  };
  const auto r = mark(ref);
  const auto p = mark(pred);

  Counts c;
  for (std::int64_t i = 0; i < frames; ++i) {
    c.tp += r[i] && p[i];
    c.fp += !r[i] && p[i];
    c.fn += r[i] && !p[i];
  }
  return c;
}

std::vector<std::pair<std::size_t, std::size_t>> match_events(std::span<const Interval> ref,
                                                              std::span<const Interval> pred,
                                                              double min_iou) {
  struct Candidate {
    std::int64_t inter, uni;
    std::size_t r, p;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    for (std::size_t j = 0; j < pred.size(); ++j) {
      const std::int64_t inter = overlap_ms(ref[i], pred[j]);
      if (inter == 0) continue;
      const std::int64_t uni = ref[i].length() + pred[j].length() - inter;
      if (static_cast<double>(inter) / static_cast<double>(uni) >= min_iou)
        candidates.push_back({inter, uni, i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    // Exact comparison of inter_a/uni_a against inter_b/uni_b.
    const __int128 lhs = static_cast<__int128>(a.inter) * b.uni;
    const __int128 rhs = static_cast<__int128>(b.inter) * a.uni;
    if (lhs != rhs) return lhs > rhs;
    if (ref[a.r].start_ms != ref[b.r].start_ms) return ref[a.r].start_ms < ref[b.r].start_ms;
    if (pred[a.p].start_ms != pred[b.p].start_ms) return pred[a.p].start_ms < pred[b.p].start_ms;
    return std::pair(a.r, a.p) < std::pair(b.r, b.p);
  });

  constexpr std::size_t kFree = static_cast<std::size_t>(-1);
  std::vector<std::size_t> ref_mate(ref.size(), kFree), pred_mate(pred.size(), kFree);
  for (const Candidate& c : candidates) {
    if (ref_mate[c.r] != kFree || pred_mate[c.p] != kFree) continue;
    ref_mate[c.r] = c.p;
    pred_mate[c.p] = c.r;
  }

  // Greedy can strand a pair when events on one side overlap each other;
  // augmenting paths recover the maximum matching. On disjoint inputs no
  // path exists and the greedy pairs stand unchanged.
  std::vector<std::vector<std::size_t>> adj(ref.size());
  for (const Candidate& c : candidates) adj[c.r].push_back(c.p);
  std::vector<char> seen(pred.size());
  const auto augment = [&](auto&& self, std::size_t r) -> bool {
    for (std::size_t p : adj[r]) {
      if (seen[p]) continue;
      seen[p] = 1;
      if (pred_mate[p] == kFree || self(self, pred_mate[p])) {
        ref_mate[r] = p;
        pred_mate[p] = r;
        return true;
      }
    }
    return false;
  };
  for (std::size_t r = 0; r < ref.size(); ++r) {
    if (ref_mate[r] != kFree || adj[r].empty()) continue;
    std::fill(seen.begin(), seen.end(), 0);
    augment(augment, r);
  }

  std::vector<std::pair<std::size_t, std::size_t>> matches;
  for (std::size_t r = 0; r < ref.size(); ++r)
    if (ref_mate[r] != kFree) matches.emplace_back(r, ref_mate[r]);
  return matches;
}

Counts event_counts(std::span<const Interval> ref, std::span<const Interval> pred, double min_iou) {
  for (const auto side : {ref, pred})
    for (const Interval& iv : side)
      if (iv.start_ms >= iv.end_ms)
        throw Error(ErrorCode::InvalidInterval,
                    "event [" + std::to_string(iv.start_ms) + ", " + std::to_string(iv.end_ms) + ") is empty");
  const auto tp = static_cast<std::int64_t>(match_events(ref, pred, min_iou).size());
  return {tp, static_cast<std::int64_t>(pred.size()) - tp, static_cast<std::int64_t>(ref.size()) - tp};
}

EvalReport segment_f1(std::span<const Interval> ref, std::span<const Interval> pred,
                      std::int64_t horizon_ms, const EvalConfig& cfg, const std::string& target) {
  cfg.validate();
  EvalReport report{cfg, {}};
  report.config.mode = EvalMode::Segment;
  report.rows.push_back({target, segment_counts(ref, pred, horizon_ms, cfg.frame_ms)});
  return report;
}

EvalReport event_f1(std::span<const Interval> ref, std::span<const Interval> pred,
                    const EvalConfig& cfg, const std::string& target) {
  cfg.validate();
  EvalReport report{cfg, {}};
  report.config.mode = EvalMode::Event;
  report.rows.push_back({target, event_counts(ref, pred, cfg.match_min_iou)});
  return report;
}

std::string target_for(LabelClass cls, ClassMapping mapping) {
  if (mapping == ClassMapping::ByGroup) {
    const ClassGroup g = class_group(cls);
    if (g == ClassGroup::Cas || g == ClassGroup::Das) return std::string(to_string(g));
  }
  return std::string(to_string(cls));
}

std::vector<std::string> all_targets(ClassMapping mapping) {
  std::vector<std::string> out;
  for (LabelClass c : kAllLabelClasses) {
    auto t = target_for(c, mapping);
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(std::move(t));
  }
  return out;
}

EvalReport evaluate(const LabelCorpus& ref, const LabelCorpus& pred, const EvalConfig& cfg,
                    const std::map<std::string, std::int64_t>& horizons_ms) {
  cfg.validate();
  const auto targets = all_targets(cfg.class_mapping);
  std::map<std::string, Counts> totals;
  for (const auto& t : targets) totals[t];

  std::set<std::string> recordings;
  for (const auto& [id, _] : ref) recordings.insert(id);
  for (const auto& [id, _] : pred) recordings.insert(id);

  const ClassIntervals empty;
  for (const std::string& rec : recordings) {
    const auto ri = ref.find(rec);
    const auto pi = pred.find(rec);
    const ClassIntervals& r = ri == ref.end() ? empty : ri->second;
    const ClassIntervals& p = pi == pred.end() ? empty : pi->second;

    std::map<std::string, std::pair<std::vector<Interval>, std::vector<Interval>>> pooled;
    std::int64_t latest = 0;
    for (const auto& [cls, list] : r)
      for (const Interval& iv : list) {
        pooled[target_for(cls, cfg.class_mapping)].first.push_back(iv);
        latest = std::max(latest, iv.end_ms);
      }
    for (const auto& [cls, list] : p)
      for (const Interval& iv : list) {
        pooled[target_for(cls, cfg.class_mapping)].second.push_back(iv);
        latest = std::max(latest, iv.end_ms);
      }

    std::int64_t horizon = latest;
    if (auto h = horizons_ms.find(rec); h != horizons_ms.end()) horizon = h->second;

    for (auto& [target, sides] : pooled) {
      if (cfg.mode == EvalMode::Segment)
        totals[target] += segment_counts(sides.first, sides.second, horizon, cfg.frame_ms);
      else
        totals[target] += event_counts(sides.first, sides.second, cfg.match_min_iou);
    }
  }

  EvalReport report{cfg, {}};
  for (const auto& t : targets) report.rows.push_back({t, totals[t]});
  return report;
}

std::string report_to_csv(const EvalReport& report) {
  std::string out = "target,tp,fp,fn,precision,recall,f1\n";
  char buf[256];
  for (const TargetScore& row : report.rows) {
    const Counts& c = row.counts;
    if (c.defined())
      std::snprintf(buf, sizeof buf, "%s,%lld,%lld,%lld,%.6f,%.6f,%.6f\n", row.target.c_str(),
                    static_cast<long long>(c.tp), static_cast<long long>(c.fp),
                    static_cast<long long>(c.fn), c.precision(), c.recall(), c.f1());
    else
      std::snprintf(buf, sizeof buf, "%s,0,0,0,undefined,undefined,undefined\n", row.target.c_str());
    out += buf;
  }
  return out;
}

}  // namespace resplab
