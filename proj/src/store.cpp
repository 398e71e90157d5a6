#include "lyrica/store.h"

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "lyrica/error.h"

namespace lyrica {

namespace fs = std::filesystem;

namespace {

constexpr const char* kStoreFormat = "lyrica-store 1";

std::uint32_t crc(std::string_view s) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(s.data()), static_cast<uInt>(s.size())));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(std::string_view s, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[at + static_cast<std::size_t>(i)]))
         << (8 * i);
  }
  return v;
}

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03lldZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<long long>(ms));
  return buf;
}

std::string new_draft_id() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  char buf[24];
  std::snprintf(buf, sizeof buf, "d%016llx", static_cast<unsigned long long>(rng()));
  return buf;
}

void fsync_dir(const fs::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
}

void append_durably(const std::string& path, const std::string& bytes) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorCode::kInput, "cannot open " + path + ": " + std::strerror(errno));
  std::size_t written = 0;
  while (written < bytes.size()) {
    const auto n = ::write(fd, bytes.data() + written, bytes.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      const std::string why = std::strerror(errno);
      ::close(fd);
      throw Error(ErrorCode::kInput, "write to " + path + " failed: " + why);
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    const std::string why = std::strerror(errno);
    ::close(fd);
    throw Error(ErrorCode::kInput, "fsync of " + path + " failed: " + why);
  }
  ::close(fd);
}

nlohmann::json version_json(const Version& v) {
  nlohmann::json j;
  j["type"] = "version";
  j["number"] = v.number;
  j["parent"] = v.parent;
  j["lines"] = v.lines;
  j["spec"] = v.spec;
  j["provenance"] = provenance_name(v.provenance);
  if (v.restored_from) j["restored_from"] = *v.restored_from;
  j["created_at"] = v.created_at;
  return j;
}

Version version_from_json(const nlohmann::json& j) {
  Version v;
  v.number = j.at("number").get<std::size_t>();
  v.parent = j.at("parent").get<std::size_t>();
  v.lines = j.at("lines").get<std::vector<std::string>>();
  v.spec = j.at("spec");
  v.provenance = parse_provenance(j.at("provenance").get<std::string>());
  if (j.contains("restored_from")) v.restored_from = j["restored_from"].get<std::size_t>();
  v.created_at = j.at("created_at").get<std::string>();
  return v;
}

}  // namespace

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kFullText: return "full_text";
    case Provenance::kContinuation: return "continuation";
    case Provenance::kRevision: return "revision";
    case Provenance::kManualEdit: return "manual_edit";
  }
  return "manual_edit";
}

Provenance parse_provenance(std::string_view name) {
  if (name == "full_text") return Provenance::kFullText;
  if (name == "continuation") return Provenance::kContinuation;
  if (name == "revision") return Provenance::kRevision;
  if (name == "manual_edit") return Provenance::kManualEdit;
  throw Error(ErrorCode::kValidation, "unknown provenance '" + std::string(name) + "'", "provenance");
}

std::string encode_record(std::string_view payload) {
  std::string out;
  out.reserve(payload.size() + 8);
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  put_u32(out, crc(payload));
  out.append(payload);
  return out;
}

std::vector<std::string> decode_records(std::string_view bytes, std::size_t* valid_bytes) {
  std::vector<std::string> out;
  std::size_t at = 0;
  while (at + 8 <= bytes.size()) {
    const std::uint32_t len = get_u32(bytes, at);
    const std::uint32_t sum = get_u32(bytes, at + 4);
    if (at + 8 + len > bytes.size()) break;
    const auto payload = bytes.substr(at + 8, len);
    if (crc(payload) != sum) break;
    out.emplace_back(payload);
    at += 8 + len;
  }
  if (valid_bytes) *valid_bytes = at;
  return out;
}

Store::Store(std::string dir) : dir_(std::move(dir)) {
  fs::create_directories(fs::path(dir_) / "drafts");
  const auto format_path = fs::path(dir_) / "FORMAT";
  if (fs::exists(format_path)) {
    std::ifstream in(format_path);
    std::string line;
    std::getline(in, line);
    if (line != kStoreFormat) {
      throw Error(ErrorCode::kConfiguration,
                  "data directory " + dir_ + " has format '" + line + "', expected '" + kStoreFormat + "'");
    }
  } else {
    append_durably(format_path.string(), std::string(kStoreFormat) + "\n");
    fsync_dir(dir_);
  }
  for (const auto& entry : fs::directory_iterator(fs::path(dir_) / "drafts")) {
    if (entry.path().extension() == ".log") load_log(entry.path().string());
  }
  if (!fs::exists(fs::path(dir_) / "index.json")) write_index();
}

void Store::load_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  std::size_t valid = 0;
  const auto records = decode_records(bytes, &valid);
  if (valid < bytes.size()) {
    // Torn tail from an interrupted append; it was never acknowledged.
    fs::resize_file(path, valid);
  }
  if (records.empty()) return;

  auto log = std::make_shared<DraftLog>();
  log->path = path;
  const auto head = nlohmann::json::parse(records.front());
  log->meta.id = head.at("id").get<std::string>();
  log->meta.title = head.at("title").get<std::string>();
  log->meta.created_at = head.at("created_at").get<std::string>();
  for (std::size_t i = 1; i < records.size(); ++i) {
    auto v = version_from_json(nlohmann::json::parse(records[i]));
    if (v.number != log->versions.size() + 1) {
      throw Error(ErrorCode::kConfiguration, "version gap in " + path);
    }
    log->versions.push_back(std::make_shared<const Version>(std::move(v)));
  }
  log->meta.version_count = log->versions.size();
  drafts_[log->meta.id] = std::move(log);
}

void Store::write_index() const {
  nlohmann::json idx = nlohmann::json::array();
  for (const auto& s : list_drafts()) {
    idx.push_back({{"id", s.id}, {"title", s.title}, {"created_at", s.created_at}});
  }
  std::lock_guard lock(index_mutex_);
  const auto path = fs::path(dir_) / "index.json";
  const auto tmp = fs::path(dir_) / "index.json.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << idx.dump(1) << '\n';
  }
  fs::rename(tmp, path);
}

DraftSummary Store::create_draft(const std::string& title) {
  auto log = std::make_shared<DraftLog>();
  log->meta.id = new_draft_id();
  log->meta.title = title;
  log->meta.created_at = now_iso8601();
  log->path = (fs::path(dir_) / "drafts" / (log->meta.id + ".log")).string();
  nlohmann::json head{{"type", "draft"},
                      {"id", log->meta.id},
                      {"title", title},
                      {"created_at", log->meta.created_at}};
  append_durably(log->path, encode_record(head.dump()));
  fsync_dir(fs::path(dir_) / "drafts");
  const auto summary = log->meta;
  {
    std::unique_lock lock(drafts_mutex_);
    drafts_[summary.id] = std::move(log);
  }
  write_index();
  return summary;
}

std::shared_ptr<Store::DraftLog> Store::find(const std::string& id) const {
  std::shared_lock lock(drafts_mutex_);
  const auto it = drafts_.find(id);
  if (it == drafts_.end()) throw Error(ErrorCode::kNotFound, "no draft '" + id + "'");
  return it->second;
}

Version Store::append_locked(DraftLog& log, Version v) {
  {
    std::shared_lock r(log.read_mutex);
    v.number = log.versions.size() + 1;
  }
  v.parent = v.number - 1;
  v.created_at = now_iso8601();
  if (v.lines.empty()) throw Error(ErrorCode::kValidation, "a version needs at least one line", "lines");
  append_durably(log.path, encode_record(version_json(v).dump()));
  std::unique_lock w(log.read_mutex);
  log.versions.push_back(std::make_shared<const Version>(v));
  log.meta.version_count = log.versions.size();
  return v;
}

Version Store::append_version(const std::string& draft_id, const std::vector<std::string>& lines,
                              const nlohmann::json& spec, Provenance provenance) {
  auto log = find(draft_id);
  std::lock_guard lock(log->write_mutex);
  Version v;
  v.lines = lines;
  v.spec = spec;
  v.provenance = provenance;
  return append_locked(*log, std::move(v));
}

Version Store::restore(const std::string& draft_id, std::size_t number) {
  auto log = find(draft_id);
  std::lock_guard lock(log->write_mutex);
  Version v = get_version(draft_id, number);
  v.restored_from = number;
  return append_locked(*log, std::move(v));
}

Version Store::get_version(const std::string& draft_id, std::size_t number) const {
  auto log = find(draft_id);
  std::shared_lock r(log->read_mutex);
  if (number < 1 || number > log->versions.size()) {
    throw Error(ErrorCode::kNotFound,
                "draft '" + draft_id + "' has no version " + std::to_string(number));
  }
  return *log->versions[number - 1];
}

std::vector<Version> Store::versions(const std::string& draft_id) const {
  auto log = find(draft_id);
  std::shared_lock r(log->read_mutex);
  std::vector<Version> out;
  for (const auto& v : log->versions) out.push_back(*v);
  return out;
}

DraftSummary Store::draft(const std::string& draft_id) const {
  auto log = find(draft_id);
  std::shared_lock r(log->read_mutex);
  return log->meta;
}

std::vector<DraftSummary> Store::list_drafts() const {
  std::vector<std::shared_ptr<DraftLog>> logs;
  {
    std::shared_lock lock(drafts_mutex_);
    for (const auto& [id, log] : drafts_) logs.push_back(log);
  }
  std::vector<DraftSummary> out;
  for (const auto& log : logs) {
    std::shared_lock r(log->read_mutex);
    out.push_back(log->meta);
  }
  std::sort(out.begin(), out.end(), [](const DraftSummary& a, const DraftSummary& b) {
    return a.created_at != b.created_at ? a.created_at < b.created_at : a.id < b.id;
  });
  return out;
}

}  // namespace lyrica
