#include "pilotkit/mesh/journal.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pilotkit/core/errors.hpp"

namespace pilotkit::mesh {

namespace fs = std::filesystem;

namespace {

class FileLock {
 public:
  FileLock(int fd, int op) : fd_(fd) {
    while (flock(fd_, op) != 0) {
      if (errno != EINTR)
        throw Error(ErrorCode::StorageFailure, std::string("flock: ") + std::strerror(errno));
    }
  }
  ~FileLock() { flock(fd_, LOCK_UN); }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_;
};

void write_all(int fd, const char* data, size_t n) {
  while (n > 0) {
    ssize_t w = ::write(fd, data, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::StorageFailure, std::string("write: ") + std::strerror(errno));
    }
    data += w;
    n -= static_cast<size_t>(w);
  }
}

}  // namespace

JsonlJournal::JsonlJournal(fs::path file) : file_(std::move(file)) {
  counter_file_ = file_;
  counter_file_ += ".count";
  fs::create_directories(file_.parent_path());
  fd_ = ::open(file_.c_str(), O_RDWR | O_CREAT | O_APPEND, 0644);
  if (fd_ < 0)
    throw Error(ErrorCode::StorageFailure,
                "cannot open journal " + file_.string() + ": " + std::strerror(errno));
}

JsonlJournal::~JsonlJournal() {
  if (fd_ >= 0) ::close(fd_);
}

JsonlJournal::JsonlJournal(JsonlJournal&& other) noexcept
    : file_(std::move(other.file_)), counter_file_(std::move(other.counter_file_)), fd_(other.fd_) {
  other.fd_ = -1;
}

JsonlJournal::Counter JsonlJournal::sync_counter_locked() const {
  Counter c;
  {
    std::ifstream in(counter_file_);
    if (in) in >> c.records >> c.bytes;
  }
  struct stat st{};
  if (fstat(fd_, &st) != 0)
    throw Error(ErrorCode::StorageFailure, std::string("fstat: ") + std::strerror(errno));
  auto size = static_cast<std::uint64_t>(st.st_size);
  if (size < c.bytes) {  // counter from a previous life of the file
    c = Counter{};
  }
  if (size > c.bytes) {
    // another process appended (or a crash left the counter stale): count the
    // newlines in the delta
    std::ifstream in(file_, std::ios::binary);
    in.seekg(static_cast<std::streamoff>(c.bytes));
    std::vector<char> buf(1 << 16);
    std::uint64_t remaining = size - c.bytes;
    while (remaining > 0 && in) {
      auto chunk = static_cast<std::streamsize>(std::min<std::uint64_t>(buf.size(), remaining));
      in.read(buf.data(), chunk);
      auto got = in.gcount();
      if (got <= 0) break;
      for (std::streamsize i = 0; i < got; ++i)
        if (buf[i] == '\n') ++c.records;
      remaining -= static_cast<std::uint64_t>(got);
    }
    c.bytes = size;
  }
  return c;
}

void JsonlJournal::write_counter_locked(const Counter& c) {
  std::ostringstream line;
  line << c.records << ' ' << c.bytes << '\n';
  std::ofstream out(counter_file_, std::ios::trunc);
  out << line.str();
}

std::uint64_t JsonlJournal::append(const nlohmann::json& record) {
  return append_lines({record.dump()});
}

std::uint64_t JsonlJournal::append_bulk(const std::vector<nlohmann::json>& records) {
  std::vector<std::string> lines;
  lines.reserve(records.size());
  for (const auto& r : records) lines.push_back(r.dump());
  return append_lines(lines);
}

std::uint64_t JsonlJournal::append_lines(const std::vector<std::string>& lines) {
  if (lines.empty())
    throw Error(ErrorCode::PreconditionViolated, "append_lines requires at least one record");
  FileLock lock(fd_, LOCK_EX);
  Counter c = sync_counter_locked();
  std::string block;
  if (c.bytes > 0) {
    // seal a torn final line left by a crashed writer so it stays one
    // (corrupt) record instead of merging with ours
    char last = 0;
    if (pread(fd_, &last, 1, static_cast<off_t>(c.bytes - 1)) == 1 && last != '\n') {
      block.push_back('\n');
      ++c.records;
    }
  }
  std::uint64_t first_seq = c.records + 1;
  for (const auto& l : lines) {
    block += l;
    block.push_back('\n');
  }
  write_all(fd_, block.data(), block.size());
  c.records += lines.size();
  c.bytes += block.size();
  write_counter_locked(c);
  return first_seq;
}

std::vector<std::string> JsonlJournal::read_lines_from(std::uint64_t from_seq) const {
  if (from_seq < 1)
    throw Error(ErrorCode::PreconditionViolated, "sequence numbers are 1-based");
  FileLock lock(fd_, LOCK_SH);
  std::ifstream in(file_, std::ios::binary);
  std::vector<std::string> out;
  std::string line;
  std::uint64_t seq = 0;
  while (std::getline(in, line)) {
    ++seq;
    if (in.eof()) break;  // unterminated tail, not a record yet
    if (seq >= from_seq) out.push_back(line);
  }
  return out;
}

std::vector<nlohmann::json> JsonlJournal::read_from(std::uint64_t from_seq,
                                                    const CorruptHandler& on_corrupt) const {
  if (from_seq < 1)
    throw Error(ErrorCode::PreconditionViolated, "sequence numbers are 1-based");
  FileLock lock(fd_, LOCK_SH);
  std::ifstream in(file_, std::ios::binary);
  std::vector<nlohmann::json> out;
  std::string line;
  std::uint64_t seq = 0;
  while (std::getline(in, line)) {
    ++seq;
    if (in.eof()) {
      // getline stopped at EOF, not '\n': a torn write. Never return it.
      if (seq >= from_seq && on_corrupt) on_corrupt(seq, line);
      break;
    }
    if (seq < from_seq) continue;
    auto parsed = nlohmann::json::parse(line, nullptr, false);
    if (parsed.is_discarded()) {
      if (on_corrupt) on_corrupt(seq, line);
      continue;
    }
    out.push_back(std::move(parsed));
  }
  return out;
}

std::uint64_t JsonlJournal::count() const {
  FileLock lock(fd_, LOCK_SH);
  // the counter file may be stale; recount the delta without writing
  return sync_counter_locked().records;
}

}  // namespace pilotkit::mesh
