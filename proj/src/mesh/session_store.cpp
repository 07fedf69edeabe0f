#include "pilotkit/mesh/session_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include "pilotkit/core/errors.hpp"

namespace pilotkit::mesh {

namespace fs = std::filesystem;

namespace {

// Cursor updates are read-modify-write across processes; serialize them with
// a lock file next to cursors.json.
class CursorLock {
 public:
  explicit CursorLock(const fs::path& cursors_file) {
    fs::path lockfile = cursors_file;
    lockfile += ".lock";
    fd_ = ::open(lockfile.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0)
      throw Error(ErrorCode::StorageFailure,
                  "cannot open " + lockfile.string() + ": " + std::strerror(errno));
    while (flock(fd_, LOCK_EX) != 0) {
      if (errno != EINTR) {
        ::close(fd_);
        throw Error(ErrorCode::StorageFailure, std::string("flock: ") + std::strerror(errno));
      }
    }
  }
  ~CursorLock() {
    if (fd_ >= 0) {
      flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }

 private:
  int fd_ = -1;
};

Json load_cursors(const fs::path& file) {
  std::ifstream in(file);
  if (!in) return Json::object();
  Json j = Json::parse(in, nullptr, false);
  return j.is_object() ? j : Json::object();
}

void store_cursors(const fs::path& file, const Json& j) {
  fs::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << j.dump() << '\n';
  }
  fs::rename(tmp, file);
}

}  // namespace

SessionStore::SessionStore(fs::path root, std::string session_id)
    : root_(std::move(root)), session_id_(std::move(session_id)) {
  events_ = std::make_unique<JsonlJournal>(root_ / "events.jsonl");
  inbox_ = std::make_unique<JsonlJournal>(root_ / "bridge" / "inbox.jsonl");
  outbox_ = std::make_unique<JsonlJournal>(root_ / "bridge" / "outbox.jsonl");
  cursors_file_ = root_ / "cursors.json";
}

std::unique_ptr<SessionStore> SessionStore::create(const fs::path& dir) {
  if (fs::exists(dir / "session.json"))
    throw Error(ErrorCode::StorageFailure, "session already exists at " + dir.string());
  fs::create_directories(dir);
  std::string id = dir.filename().string();
  {
    std::ofstream marker(dir / "session.json");
    marker << Json{{"session_id", id}, {"schema", 1}, {"created_wall_s", wall_now_s()}}.dump()
           << '\n';
  }
  return std::unique_ptr<SessionStore>(new SessionStore(dir, id));
}

std::unique_ptr<SessionStore> SessionStore::open(const fs::path& dir) {
  std::ifstream marker(dir / "session.json");
  if (!marker)
    throw Error(ErrorCode::NoSuchSession, "no session at " + dir.string());
  Json j = Json::parse(marker, nullptr, false);
  std::string id = j.is_object() ? j.value("session_id", dir.filename().string())
                                 : dir.filename().string();
  return std::unique_ptr<SessionStore>(new SessionStore(dir, id));
}

std::uint64_t SessionStore::persist(const Event& ev) { return events_->append(Json(ev)); }

std::uint64_t SessionStore::persist_bulk(const std::vector<Event>& evs) {
  std::vector<Json> records;
  records.reserve(evs.size());
  for (const auto& e : evs) records.emplace_back(e);
  return events_->append_bulk(records);
}

std::vector<Event> SessionStore::replay(std::uint64_t from_seq,
                                        const CorruptHandler& on_corrupt) const {
  auto raw = events_->read_from(from_seq, on_corrupt);
  std::vector<Event> out;
  out.reserve(raw.size());
  std::uint64_t seq = from_seq;
  for (const auto& j : raw) {
    try {
      out.push_back(j.get<Event>());
    } catch (const std::exception&) {
      if (on_corrupt) on_corrupt(seq, j.dump());
    }
    ++seq;
  }
  return out;
}

std::uint64_t SessionStore::event_count() const { return events_->count(); }

JsonlJournal& SessionStore::bridge(BridgeChannel ch) {
  return ch == BridgeChannel::Inbox ? *inbox_ : *outbox_;
}

std::uint64_t SessionStore::bridge_put(BridgeChannel ch, const Json& message) {
  return bridge(ch).append(message);
}

std::uint64_t SessionStore::bridge_put_bulk(BridgeChannel ch, const std::vector<Json>& messages) {
  return bridge(ch).append_bulk(messages);
}

std::vector<Json> SessionStore::bridge_take(BridgeChannel ch, const std::string& consumer,
                                            size_t max_n) {
  std::lock_guard guard(cursor_mutex_);
  CursorLock lock(cursors_file_);
  Json cursors = load_cursors(cursors_file_);
  std::uint64_t pos = cursors.value(consumer, 0ULL);
  auto lines = bridge(ch).read_lines_from(pos + 1);
  if (max_n > 0 && lines.size() > max_n) lines.resize(max_n);
  std::vector<Json> msgs;
  msgs.reserve(lines.size());
  for (const auto& l : lines) {
    auto parsed = Json::parse(l, nullptr, false);
    if (!parsed.is_discarded()) msgs.push_back(std::move(parsed));
  }
  if (!lines.empty()) {
    // corrupt lines count as consumed; the cursor tracks lines, not messages
    cursors[consumer] = pos + lines.size();
    store_cursors(cursors_file_, cursors);
  }
  return msgs;
}

std::uint64_t SessionStore::cursor(const std::string& consumer) const {
  std::lock_guard guard(cursor_mutex_);
  CursorLock lock(cursors_file_);
  return load_cursors(cursors_file_).value(consumer, 0ULL);
}

std::string generate_session_id() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%d.%H%M%S", &tm);
  std::random_device rd;
  std::ostringstream id;
  id << "pk." << stamp << "." << std::hex << (rd() & 0xffff);
  return id.str();
}

}  // namespace pilotkit::mesh
