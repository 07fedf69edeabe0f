#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "pilotkit/core/types.hpp"
#include "pilotkit/mesh/journal.hpp"

namespace pilotkit::mesh {

enum class BridgeChannel { Inbox, Outbox };

/// Persistent per-session storage: the append-only event log, the
/// client<->agent bridge files, and the consumer cursors. This is the one
/// durable coordination point between the client process and agent processes.
///
/// Layout: <dir>/events.jsonl, <dir>/bridge/{inbox,outbox}.jsonl,
/// <dir>/cursors.json. All newline-delimited JSON, UTF-8.
class SessionStore {
 public:
  /// Creates a fresh session directory (must not already contain one).
  static std::unique_ptr<SessionStore> create(const std::filesystem::path& dir);

  /// Opens an existing session directory; throws NoSuchSession otherwise.
  static std::unique_ptr<SessionStore> open(const std::filesystem::path& dir);

  const std::string& session_id() const { return session_id_; }
  const std::filesystem::path& root() const { return root_; }

  std::uint64_t persist(const Event& ev);
  std::uint64_t persist_bulk(const std::vector<Event>& evs);

  /// All events with sequence >= from_seq, in order. Corrupt lines reported.
  std::vector<Event> replay(std::uint64_t from_seq, const CorruptHandler& on_corrupt = {}) const;

  std::uint64_t event_count() const;

  std::uint64_t bridge_put(BridgeChannel ch, const Json& message);
  std::uint64_t bridge_put_bulk(BridgeChannel ch, const std::vector<Json>& messages);

  /// New messages for a named consumer; advances that consumer's cursor.
  /// Addressing (the "to"/"from" fields) is the caller's concern.
  std::vector<Json> bridge_take(BridgeChannel ch, const std::string& consumer, size_t max_n);

  std::uint64_t cursor(const std::string& consumer) const;

 private:
  SessionStore(std::filesystem::path root, std::string session_id);

  JsonlJournal& bridge(BridgeChannel ch);
  void set_cursor(const std::string& consumer, std::uint64_t value);

  std::filesystem::path root_;
  std::string session_id_;
  std::unique_ptr<JsonlJournal> events_;
  std::unique_ptr<JsonlJournal> inbox_;
  std::unique_ptr<JsonlJournal> outbox_;
  std::filesystem::path cursors_file_;
  mutable std::mutex cursor_mutex_;
};

/// Session directory for the CLI: <parent>/pk.<UTC timestamp>.<pid hex>.
std::string generate_session_id();

}  // namespace pilotkit::mesh
