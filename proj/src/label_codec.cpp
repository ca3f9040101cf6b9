#include "resplab/label_codec.hpp"

#include "resplab/error.hpp"

namespace resplab {

namespace schema {

void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, where + ": " + what);
}

const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(where + "." + key, "missing");
  return *it;
}

std::int64_t integer(const Json& obj, const char* key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_number_integer()) fail(where + "." + key, "expected an integer");
  return v.get<std::int64_t>();
}

std::string string(const Json& obj, const char* key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_string()) fail(where + "." + key, "expected a string");
  return v.get<std::string>();
}

}  // namespace schema

Json annotation_to_json(const Annotation& a) {
  return Json{{"id", a.id},
              {"class", std::string(to_string(a.cls))},
              {"track", a.track_id},
              {"start_ms", a.start_ms},
              {"end_ms", a.end_ms},
              {"created_at", format_rfc3339(a.created_at)},
              {"updated_at", format_rfc3339(a.updated_at)}};
}

Annotation annotation_from_json(const Json& j, const std::string& annotator, const std::string& where) {
  Annotation a;
  a.id = schema::string(j, "id", where);
  if (a.id.empty()) schema::fail(where + ".id", "empty");
  const std::string cls = schema::string(j, "class", where);
  const auto parsed = try_parse_label_class(cls);
  if (!parsed) schema::fail(where + ".class", "unknown label class '" + cls + "'");
  a.cls = *parsed;
  a.track_id = static_cast<int>(schema::integer(j, "track", where));
  a.start_ms = schema::integer(j, "start_ms", where);
  a.end_ms = schema::integer(j, "end_ms", where);
  a.annotator = annotator;
  try {
    a.created_at = parse_rfc3339(schema::string(j, "created_at", where));
    a.updated_at = parse_rfc3339(schema::string(j, "updated_at", where));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SchemaViolation) throw;
    schema::fail(where, e.what());
  }
  return a;
}

Json snapshot_to_json(const AnnotationSet& set) {
  Json labels = Json::array();
  for (const Annotation& a : set.annotations()) labels.push_back(annotation_to_json(a));
  return Json{{"version", kSnapshotVersion},
              {"recording_id", set.recording_id()},
              {"annotator", set.annotator()},
              {"revision", set.revision()},
              {"labels", std::move(labels)}};
}

AnnotationSet snapshot_from_json(const Json& j, const TrackLayout& layout,
                                 std::optional<std::int64_t> duration_ms) {
  const std::string root = "snapshot";
  if (schema::integer(j, "version", root) != kSnapshotVersion)
    schema::fail(root + ".version", "unsupported version");
  AnnotationSet set(schema::string(j, "recording_id", root), schema::string(j, "annotator", root),
                    layout, duration_ms);
  const std::int64_t revision = schema::integer(j, "revision", root);
  if (revision < 0) schema::fail(root + ".revision", "negative");
  const Json& labels = schema::field(j, "labels", root);
  if (!labels.is_array()) schema::fail(root + ".labels", "expected an array");
  for (std::size_t i = 0; i < labels.size(); ++i)
    set.insert_unchecked(annotation_from_json(labels[i], set.annotator(),
                                              root + ".labels[" + std::to_string(i) + "]"));
  set.set_revision(revision);
  return set;
}

Json violations_to_json(const std::vector<Violation>& violations) {
  Json out = Json::array();
  for (const Violation& v : violations)
    out.push_back({{"kind", std::string(to_string(v.kind))}, {"ids", v.ids}, {"message", v.message}});
  return out;
}

}  // namespace resplab
