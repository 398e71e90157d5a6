/**
 * @file store.h
 * @brief Drafts with append-only, linear version history.
 *
 * Data directory layout (format 1):
 *
 *   FORMAT            "lyrica-store 1"
 *   index.json        [{"id", "title", "created_at"}]; rebuilt from the logs
 *                     when missing
 *   drafts/<id>.log   record log, one per draft
 *
 * A record is [u32 little-endian payload length][u32 little-endian CRC-32 of
 * payload][payload], the payload being UTF-8 JSON. The first record of a log
 * describes the draft, every following record is one version. An append is
 * acknowledged only after the record has been fsync'ed; a torn trailing
 * record (short or failing its checksum) is dropped on open.
 */
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lyrica/decode.h"
#include "lyrica/text.h"

namespace lyrica {

enum class Provenance { kFullText, kContinuation, kRevision, kManualEdit };

std::string_view provenance_name(Provenance p);
/// Throws kValidation for unknown names.
Provenance parse_provenance(std::string_view name);

struct Version {
  std::size_t number = 0;
  std::size_t parent = 0;  // 0 for the first version
  std::vector<std::string> lines;
  nlohmann::json spec;  // ControlSpec snapshot as submitted
  Provenance provenance = Provenance::kManualEdit;
  std::optional<std::size_t> restored_from;
  std::string created_at;
};

struct DraftSummary {
  std::string id;
  std::string title;
  std::string created_at;
  std::size_t version_count = 0;
};

class Store {
 public:
  /// Opens or initializes a data directory. Throws kConfiguration on a
  /// format mismatch.
  explicit Store(std::string dir);

  DraftSummary create_draft(const std::string& title);
  Version append_version(const std::string& draft_id, const std::vector<std::string>& lines,
                         const nlohmann::json& spec, Provenance provenance);
  /// Appends a copy of version `number` as a new version.
  Version restore(const std::string& draft_id, std::size_t number);

  Version get_version(const std::string& draft_id, std::size_t number) const;
  std::vector<Version> versions(const std::string& draft_id) const;
  DraftSummary draft(const std::string& draft_id) const;
  std::vector<DraftSummary> list_drafts() const;

  const std::string& dir() const { return dir_; }

 private:
  struct DraftLog {
    mutable std::mutex write_mutex;
    mutable std::shared_mutex read_mutex;
    DraftSummary meta;
    std::vector<std::shared_ptr<const Version>> versions;
    std::string path;
  };

  std::shared_ptr<DraftLog> find(const std::string& id) const;
  Version append_locked(DraftLog& log, Version v);
  void write_index() const;
  void load_log(const std::string& path);

  std::string dir_;
  mutable std::shared_mutex drafts_mutex_;
  mutable std::mutex index_mutex_;
  std::map<std::string, std::shared_ptr<DraftLog>> drafts_;
};

/// Frames a payload as a store record.
std::string encode_record(std::string_view payload);

/// Decodes consecutive records from `bytes`; stops at the first torn or
/// corrupt record. `valid_bytes` receives the length of the intact prefix.
std::vector<std::string> decode_records(std::string_view bytes, std::size_t* valid_bytes = nullptr);

}  // namespace lyrica
