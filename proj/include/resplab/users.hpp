#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "resplab/time.hpp"

namespace resplab {

struct UserRecord {
  std::string user_id;
  Timestamp created_at{};

  friend bool operator==(const UserRecord&, const UserRecord&) = default;
};

// 1..64 chars of [A-Za-z0-9._-], not starting with '.'. User ids become
// file names, so anything that could escape a directory is refused.
bool is_valid_user_id(std::string_view id);

// Unauthenticated annotator registry kept in "<root>/users.json".
class UserRegistry {
 public:
  explicit UserRegistry(std::filesystem::path data_root);

  // Creates the record on first use. Throws InvalidUserId.
  UserRecord resolve_user(const std::string& user_id);

 private:
  std::filesystem::path file_;
};

}  // namespace resplab
