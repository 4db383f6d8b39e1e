#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace bloombench {

/// Append-only JSONL log with a single writer. Every append is flushed and
/// fsync'ed before returning, so an acknowledged event survives a crash.
class SessionLog {
 public:
  explicit SessionLog(std::filesystem::path path);
  ~SessionLog();
  SessionLog(const SessionLog&) = delete;
  SessionLog& operator=(const SessionLog&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

  /// Appends `line` plus '\n'. Throws IoError.
  void append(std::string_view line);

  /// Complete lines currently in the log. A torn final line (no trailing
  /// newline) is dropped.
  std::vector<std::string> read_all() const;

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  std::mutex mutex_;
};

/// Writes `content` to `path` via a temporary file, fsync and rename.
void write_file_durably(const std::filesystem::path& path, std::string_view content);

}  // namespace bloombench
