#include "resplab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "resplab/error.hpp"
#include "resplab/label_store.hpp"

namespace resplab {

namespace fs = std::filesystem;

double round2(double value) { return std::round(value * 100.0) / 100.0; }

namespace {

// num / den rounded half up to hundredths, from integers so that ties are exact.
double hundredths(std::int64_t num, std::int64_t den) {
  const std::int64_t q = (2 * num + den) / (2 * den);
  return static_cast<double>(q) / 100.0;
}

}  // namespace

double StatsRow::total_duration_min() const { return hundredths(total_ms, 600); }

std::optional<double> StatsRow::mean_duration_sec() const {
  if (count == 0) return std::nullopt;
  return hundredths(total_ms, count * 10);
}

double StatsTable::recording_total_min() const { return hundredths(recording_total_ms, 600); }

const StatsRow* StatsTable::find_class(LabelClass cls) const {
  for (const StatsRow& r : classes)
    if (r.name == to_string(cls)) return &r;
  return nullptr;
}

const StatsRow* StatsTable::find_group(ClassGroup group) const {
  for (const StatsRow& r : groups)
    if (r.name == to_string(group)) return &r;
  return nullptr;
}

namespace {

StatsTable empty_table() {
  StatsTable t;
  for (LabelClass c : kAllLabelClasses) t.classes.push_back({std::string(to_string(c))});
  for (ClassGroup g : kAllClassGroups) t.groups.push_back({std::string(to_string(g))});
  return t;
}

void accumulate(StatsTable& t, const AnnotationSet& set, std::int64_t duration_ms) {
  ++t.recordings;
  t.recording_total_ms += duration_ms;
  for (const Annotation& a : set.annotations()) {
    const auto ci = static_cast<std::size_t>(
        std::find(kAllLabelClasses.begin(), kAllLabelClasses.end(), a.cls) - kAllLabelClasses.begin());
    const auto gi = static_cast<std::size_t>(
        std::find(kAllClassGroups.begin(), kAllClassGroups.end(), class_group(a.cls)) -
        kAllClassGroups.begin());
    for (StatsRow* row : {&t.classes[ci], &t.groups[gi]}) {
      ++row->count;
      row->total_ms += a.duration_ms();
    }
  }
}

}  // namespace

StatsTable dataset_stats(std::span<const LabeledRecording> recordings) {
  StatsTable t = empty_table();
  for (const LabeledRecording& r : recordings) accumulate(t, *r.labels, r.duration_ms);
  return t;
}

StatsTable dataset_stats_from_dir(const fs::path& root, std::int64_t recording_ms) {
  std::error_code ec;
  if (!fs::is_directory(root, ec))
    throw Error(ErrorCode::IoFailure, "'" + root.string() + "' is not a directory");
  // A label file that has only been autosaved so far exists only as its journal.
  std::set<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    fs::path p = entry.path();
    std::string name = p.filename().string();
    if (name.ends_with(".labels.json.journal")) {
      p.replace_extension();
      name = p.filename().string();
    }
    if (name.size() > 12 && name.ends_with(".labels.json")) files.insert(p);
  }

  StatsTable t = empty_table();
  for (const fs::path& f : files) {
    try {
      const AnnotationSet set = load_labels(f);
      accumulate(t, set, recording_ms);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::IoFailure) throw;
      t.skipped.push_back(f.string() + ": " + e.what());
    }
  }
  return t;
}

std::string stats_to_csv(const StatsTable& table) {
  std::string out = "kind,name,count,total_duration_min,mean_duration_sec\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "recordings,recordings,%lld,%.2f,\n",
                static_cast<long long>(table.recordings), table.recording_total_min());
  out += buf;
  const auto emit = [&](const char* kind, const StatsRow& r) {
    const auto mean = r.mean_duration_sec();
    if (mean)
      std::snprintf(buf, sizeof buf, "%s,%s,%lld,%.2f,%.2f\n", kind, r.name.c_str(),
                    static_cast<long long>(r.count), r.total_duration_min(), *mean);
    else
      std::snprintf(buf, sizeof buf, "%s,%s,%lld,%.2f,\n", kind, r.name.c_str(),
                    static_cast<long long>(r.count), r.total_duration_min());
    out += buf;
  };
  for (const StatsRow& r : table.classes) emit("class", r);
  for (const StatsRow& r : table.groups) emit("group", r);
  return out;
}

}  // namespace resplab
