#include "resplab/predictions.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "resplab/error.hpp"
#include "resplab/io.hpp"
#include "resplab/label_store.hpp"

namespace resplab {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_row(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, "line " + std::to_string(line) + ": " + what);
}

std::int64_t parse_ms(std::string_view field, std::size_t line) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    bad_row(line, "'" + std::string(field) + "' is not an integer millisecond value");
  return v;
}

void sort_corpus(LabelCorpus& corpus) {
  for (auto& [rec, by_class] : corpus)
    for (auto& [cls, list] : by_class) std::sort(list.begin(), list.end());
}

void merge_into(LabelCorpus& into, const LabelCorpus& from) {
  for (const auto& [rec, by_class] : from)
    for (const auto& [cls, list] : by_class) {
      auto& dst = into[rec][cls];
      dst.insert(dst.end(), list.begin(), list.end());
    }
}

}  // namespace

LabelCorpus parse_prediction_csv(std::string_view text) {
  LabelCorpus corpus;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = std::min(text.find('\n', pos), text.size());
    const std::string_view line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 4) bad_row(line_no, "expected 4 columns, found " + std::to_string(fields.size()));
    if (fields[0] == "recording_id" && fields[1] == "class") continue;  // header

    const auto cls = try_parse_label_class(fields[1]);
    if (!cls) bad_row(line_no, "unknown label class '" + std::string(fields[1]) + "'");
    const Interval iv{parse_ms(fields[2], line_no), parse_ms(fields[3], line_no)};
    if (iv.start_ms < 0 || iv.start_ms >= iv.end_ms)
      bad_row(line_no, "start_ms must be >= 0 and < end_ms");
    if (fields[0].empty()) bad_row(line_no, "empty recording_id");
    corpus[std::string(fields[0])][*cls].push_back(iv);
  }
  sort_corpus(corpus);
  return corpus;
}

LabelCorpus load_prediction_file(const fs::path& path) {
  const std::string text = read_file_text(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const AnnotationSet set = load_labels(path);
    for (const Annotation& a : set.annotations())
      if (a.start_ms < 0 || a.start_ms >= a.end_ms)
        throw Error(ErrorCode::SchemaViolation, path.string() + ": label " + a.id + " has start >= end");
    return corpus_from_set(set);
  }
  try {
    return parse_prediction_csv(text);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

LabelCorpus load_prediction_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && (name.ends_with(".labels.json") || name.ends_with(".csv")))
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  LabelCorpus corpus;
  for (const fs::path& f : files) merge_into(corpus, load_prediction_file(f));
  sort_corpus(corpus);
  return corpus;
}

std::string encode_prediction_csv(const LabelCorpus& corpus) {
  std::ostringstream out;
  out << "recording_id,class,start_ms,end_ms\n";
  for (const auto& [rec, by_class] : corpus)
    for (const auto& [cls, list] : by_class)
      for (const Interval& iv : list) out << rec << ',' << to_string(cls) << ',' << iv.start_ms << ',' << iv.end_ms << '\n';
  return out.str();
}

}  // namespace resplab
