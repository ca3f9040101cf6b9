#include "resplab/users.hpp"

#include <cctype>

#include "resplab/error.hpp"
#include "resplab/io.hpp"
#include "resplab/label_codec.hpp"

namespace resplab {

namespace fs = std::filesystem;

bool is_valid_user_id(std::string_view id) {
  if (id.empty() || id.size() > 64 || id.front() == '.') return false;
  for (char c : id) {
    const auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || c == '.' || c == '_' || c == '-')) return false;
  }
  return true;
}

UserRegistry::UserRegistry(fs::path data_root) : file_(std::move(data_root) / "users.json") {}

UserRecord UserRegistry::resolve_user(const std::string& user_id) {
  if (!is_valid_user_id(user_id))
    throw Error(ErrorCode::InvalidUserId, "'" + user_id + "' is not a valid user id");

  auto lock_file = file_;
  lock_file += ".lock";
  if (file_.has_parent_path()) fs::create_directories(file_.parent_path());
  FileLock lock(lock_file, FileLock::Mode::Wait);

  Json doc = Json{{"users", Json::object()}};
  std::error_code ec;
  if (fs::exists(file_, ec)) {
    try {
      doc = Json::parse(read_file_text(file_));
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::SchemaViolation, file_.string() + ": " + e.what());
    }
  }
  Json& users = doc["users"];
  if (!users.is_object()) schema::fail("users", "expected an object");
  if (auto it = users.find(user_id); it != users.end())
    return {user_id, parse_rfc3339(schema::string(*it, "created_at", "users." + user_id))};

  const UserRecord rec{user_id, now_utc()};
  users[user_id] = {{"created_at", format_rfc3339(rec.created_at)}};
  write_file_atomic(file_, doc.dump(2) + "\n");
  return rec;
}

}  // namespace resplab
