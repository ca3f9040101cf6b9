#pragma once

#include <filesystem>
#include <string>

#include "resplab/metrics.hpp"

namespace resplab {

// Detector output or reference labels, either as a label snapshot (JSON)
// or as CSV rows "recording_id,class,start_ms,end_ms" with an optional
// header. Intervals come back grouped by class and sorted by start.
// Throws SchemaViolation (with line numbers for CSV).
LabelCorpus load_prediction_file(const std::filesystem::path& path);
LabelCorpus parse_prediction_csv(std::string_view text);

// Every "*.labels.json" and "*.csv" under a directory, merged.
LabelCorpus load_prediction_dir(const std::filesystem::path& dir);

std::string encode_prediction_csv(const LabelCorpus& corpus);

}  // namespace resplab
