#pragma once

#include <string>

#include "json.hpp"
#include "resplab/annotation.hpp"

namespace resplab {

using Json = nlohmann::json;

// {id, class, track, start_ms, end_ms, created_at, updated_at}
Json annotation_to_json(const Annotation& a);
// `where` prefixes field paths in SchemaViolation messages.
Annotation annotation_from_json(const Json& j, const std::string& annotator,
                                const std::string& where = "label");

// Label snapshot document, version 1.
inline constexpr int kSnapshotVersion = 1;
Json snapshot_to_json(const AnnotationSet& set);
AnnotationSet snapshot_from_json(const Json& j, const TrackLayout& layout = TrackLayout::default_layout(),
                                 std::optional<std::int64_t> duration_ms = std::nullopt);

Json violations_to_json(const std::vector<Violation>& violations);

// Typed field access that reports the JSON path on failure.
namespace schema {
const Json& field(const Json& obj, const char* key, const std::string& where);
std::int64_t integer(const Json& obj, const char* key, const std::string& where);
std::string string(const Json& obj, const char* key, const std::string& where);
[[noreturn]] void fail(const std::string& where, const std::string& what);
}  // namespace schema

}  // namespace resplab
