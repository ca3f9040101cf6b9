#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "resplab/annotation.hpp"

namespace resplab {

struct StatsRow {
  std::string name;
  std::int64_t count = 0;
  std::int64_t total_ms = 0;

  // Rounded to two decimals (half away from zero).
  double total_duration_min() const;
  // Absent when count == 0.
  std::optional<double> mean_duration_sec() const;
};

struct StatsTable {
  std::int64_t recordings = 0;
  std::int64_t recording_total_ms = 0;
  std::vector<StatsRow> classes;  // every LabelClass, taxonomy order
  std::vector<StatsRow> groups;   // phase, cas, das, noise
  std::vector<std::string> skipped;  // "path: reason" for files that failed to parse

  double recording_total_min() const;
  const StatsRow* find_class(LabelClass cls) const;
  const StatsRow* find_group(ClassGroup group) const;
};

double round2(double value);

struct LabeledRecording {
  const AnnotationSet* labels = nullptr;
  std::int64_t duration_ms = 0;
};

StatsTable dataset_stats(std::span<const LabeledRecording> recordings);

// Every label file under `root` (recursive): "*.labels.json" snapshots with
// their journals replayed, and journals whose snapshot does not exist yet.
// Each file counts as one recording of `recording_ms`. Files that fail to
// load are listed in `skipped`.
StatsTable dataset_stats_from_dir(const std::filesystem::path& root,
                                  std::int64_t recording_ms = 15000);

// kind,name,count,total_duration_min,mean_duration_sec
std::string stats_to_csv(const StatsTable& table);

}  // namespace resplab
