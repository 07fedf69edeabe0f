#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace pilotkit::mesh {

/// Called for every unparseable journal line: (sequence, raw line).
using CorruptHandler = std::function<void(std::uint64_t, const std::string&)>;

/// Append-only newline-delimited JSON file shared between processes.
/// Appends take an exclusive flock; reads take a shared one, so a reader never
/// observes a half-written append. Sequence numbers are 1-based line numbers,
/// kept dense via a sidecar counter that self-heals by rescanning the byte
/// range other processes appended.
class JsonlJournal {
 public:
  explicit JsonlJournal(std::filesystem::path file);
  ~JsonlJournal();

  JsonlJournal(const JsonlJournal&) = delete;
  JsonlJournal& operator=(const JsonlJournal&) = delete;
  JsonlJournal(JsonlJournal&& other) noexcept;

  const std::filesystem::path& path() const { return file_; }

  /// Appends one record, durable before return. Returns its sequence number.
  std::uint64_t append(const nlohmann::json& record);

  /// Appends records contiguously under one lock; returns the sequence of the
  /// first. The bulk is all-or-nothing with respect to other appenders.
  std::uint64_t append_bulk(const std::vector<nlohmann::json>& records);
  std::uint64_t append_lines(const std::vector<std::string>& lines);

  /// All records with sequence >= from_seq (1-based), in order. Corrupt lines
  /// are skipped and reported, never returned and never fatal.
  std::vector<nlohmann::json> read_from(std::uint64_t from_seq,
                                        const CorruptHandler& on_corrupt = {}) const;

  /// Raw lines, same numbering as read_from but without parsing.
  std::vector<std::string> read_lines_from(std::uint64_t from_seq) const;

  std::uint64_t count() const;

 private:
  struct Counter {
    std::uint64_t records = 0;
    std::uint64_t bytes = 0;
  };

  Counter sync_counter_locked() const;
  void write_counter_locked(const Counter& c);

  std::filesystem::path file_;
  std::filesystem::path counter_file_;
  int fd_ = -1;
};

}  // namespace pilotkit::mesh
