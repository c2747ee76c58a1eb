// Copyright 2026 The pgpfwd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// The MTA-side transformer: a store of proxy factors keyed by (source, dest)
// key IDs, and message processing that validates the ephemeral share,
// multiplies it by k and rewrites the PKESK for every matching forwardee.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pgpfwd/bytes.hpp"
#include "pgpfwd/forwarding.hpp"
#include "pgpfwd/scalar_field.hpp"

namespace pgpfwd {

struct ForwardingEntry {
  KeyId source_key_id{};
  KeyId dest_key_id{};
  ProxyFactor proxy_factor;
  Fingerprint source_fingerprint{};
  bool enabled = true;

  friend bool operator==(const ForwardingEntry&,
                         const ForwardingEntry&) = default;
};

// The proxy's share of a grant: key IDs, k and the source fingerprint.
ForwardingEntry make_forwarding_entry(const KeyId& source_key_id,
                                      const ForwardingGrant& grant);

// Unencrypted envelope data a filter can look at.
struct MessageMetadata {
  std::string sender;
  std::string recipient;
  std::vector<std::pair<std::string, std::string>> headers;
};

// Sidecar format: one "key: value" per line. "sender" and "recipient" are
// recognised; every other key becomes a header. Blank lines and lines
// starting with '#' are skipped.
MessageMetadata parse_metadata(std::string_view text);

struct FilterRule {
  enum class Field { kSender, kRecipient, kHeaderName };
  enum class Action { kForward, kDrop };

  Field field = Field::kSender;
  std::string pattern;  // shell-style glob, matched case-sensitively
  Action action = Action::kForward;
  // Applies to every entry when unset.
  std::optional<KeyId> dest_key_id;
};

// Parses "sender|recipient|header <glob> forward|drop [dest=<keyid>]".
FilterRule parse_filter_rule(std::string_view text);

enum class EntryOutcome {
  kDelivered,
  kRejectedSmallSubgroup,
  kRejectedNotInSubgroup,
  kFiltered,
};

std::string_view entry_outcome_name(EntryOutcome outcome);

struct OutcomeRecord {
  KeyId source_key_id{};
  KeyId dest_key_id{};
  int hop = 1;
  EntryOutcome outcome = EntryOutcome::kDelivered;
};

struct TransformReport {
  // Recipient key IDs of the incoming PKESKs, in packet order.
  std::vector<KeyId> input_key_ids;
  std::vector<OutcomeRecord> outcomes;
  // Whole-message wall time rounded up to 10 ms.
  std::string timing_note;

  std::size_t delivered() const;
  // One "key=value ..." line per outcome; a single line when nothing matched.
  std::string to_log(std::string_view message_name = {}) const;
};

struct ForwardedMessage {
  KeyId dest_key_id{};
  std::string armored;
};

struct ProcessResult {
  std::vector<ForwardedMessage> outputs;
  TransformReport report;
};

// Binary store: magic "PGPFWDST", u16 version, u32 record count, then
// records of u16 length | src(8) | dst(8) | k(32, little-endian) | fp(20) |
// enabled(1), then SHA-256 over everything before it.
Bytes serialize_store(const std::vector<ForwardingEntry>& entries);
// A zero-length input is an empty store. Throws kCorruptStore otherwise
// when the checksum, magic, version or record layout is wrong.
std::vector<ForwardingEntry> parse_store(ByteView data);

// Missing file loads as an empty store. Throws kStorageFailure on I/O
// errors and kCorruptStore on bad contents.
std::vector<ForwardingEntry> store_load(const std::filesystem::path& path);
// Writes a sibling temp file, flushes it and renames it over `path`.
void store_save(const std::vector<ForwardingEntry>& entries,
                const std::filesystem::path& path);

class ProxyService {
 public:
  static constexpr int kDefaultMaxDepth = 8;

  // In-memory only.
  ProxyService() = default;
  // Loads `store_path` and persists every mutation back to it.
  explicit ProxyService(std::filesystem::path store_path);

  // Throws kDuplicateEntry for an existing (source, dest) pair, disabled or
  // not, and kStorageFailure when persisting fails (the entry is then not
  // added).
  void register_forwarding(const ForwardingEntry& entry);
  // Disables the entry. Throws kNotFound when no such pair exists.
  void revoke_forwarding(const KeyId& source, const KeyId& dest);

  void set_filters(std::vector<FilterRule> rules);
  void set_max_depth(int depth);

  std::vector<ForwardingEntry> entries() const;
  void save(const std::filesystem::path& path) const;

  // Parse failures (armor or packets) abort with the underlying error;
  // per-entry validation failures are recorded in the report.
  ProcessResult process_message(std::string_view armored,
                                const MessageMetadata& metadata = {}) const;

 private:
  void persist_locked() const;

  mutable std::shared_mutex mutex_;
  std::vector<ForwardingEntry> entries_;
  std::vector<FilterRule> filters_;
  int max_depth_ = kDefaultMaxDepth;
  std::optional<std::filesystem::path> store_path_;
};

struct BatchSummary {
  std::size_t messages = 0;
  std::size_t outputs = 0;
  std::size_t failed = 0;  // messages that could not be parsed
  std::vector<std::string> report_lines;
};

// Processes every "*.asc" in `in_dir` (with an optional "<name>.meta"
// sidecar) and writes "<out_dir>/<dest keyid>/<name>.asc" plus
// "<out_dir>/report.log". Throws kIoFailure when a directory is unusable.
BatchSummary run_batch(const ProxyService& service,
                       const std::filesystem::path& in_dir,
                       const std::filesystem::path& out_dir);

}  // namespace pgpfwd
