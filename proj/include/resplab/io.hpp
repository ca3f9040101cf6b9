#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace resplab {

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
std::string read_file_text(const std::filesystem::path& path);

// Writes to a sibling temp file, fsyncs, then renames over `path`, so
// readers observe either the old or the new content.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Exclusive advisory lock (flock) on `path`, created if missing. Released
// on destruction or when the process dies.
class FileLock {
 public:
  enum class Mode { Try, Wait };

  FileLock(const std::filesystem::path& path, Mode mode);
  ~FileLock();
  FileLock(FileLock&& other) noexcept;
  FileLock& operator=(FileLock&& other) noexcept;
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace resplab
