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

#include "pgpfwd/proxy_service.hpp"

#include <fcntl.h>
#include <fnmatch.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <system_error>

#include "byte_reader.hpp"
#include "digest.hpp"
#include "pgpfwd/armor.hpp"
#include "pgpfwd/curve_group.hpp"
#include "pgpfwd/errors.hpp"
#include "pgpfwd/pgp_codec.hpp"

namespace pgpfwd {

namespace {

constexpr std::string_view kStoreMagic = "PGPFWDST";
constexpr std::uint16_t kStoreVersion = 1;
constexpr std::uint16_t kRecordLength = 8 + 8 + 32 + 20 + 1;
constexpr std::size_t kChecksumLength = 32;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

bool glob_match(const std::string& pattern, const std::string& value) {
  return fnmatch(pattern.c_str(), value.c_str(), 0) == 0;
}

bool rule_matches(const FilterRule& rule, const MessageMetadata& meta) {
  switch (rule.field) {
    case FilterRule::Field::kSender:
      return glob_match(rule.pattern, meta.sender);
    case FilterRule::Field::kRecipient:
      return glob_match(rule.pattern, meta.recipient);
    case FilterRule::Field::kHeaderName:
      return std::any_of(meta.headers.begin(), meta.headers.end(),
                         [&](const auto& h) {
                           return glob_match(rule.pattern, h.first);
                         });
  }
  return false;
}

// First matching rule decides; no match forwards.
bool passes_filters(const std::vector<FilterRule>& rules,
                    const MessageMetadata& meta, const KeyId& dest) {
  for (const auto& rule : rules) {
    if (rule.dest_key_id && *rule.dest_key_id != dest) continue;
    if (rule_matches(rule, meta)) {
      return rule.action == FilterRule::Action::kForward;
    }
  }
  return true;
}

enum class Validation { kOk, kLowOrder, kNotInSubgroup };

Validation validate_point(const CurvePoint& p) {
  if (is_low_order(p)) return Validation::kLowOrder;
  if (!is_in_large_subgroup(p)) return Validation::kNotInSubgroup;
  return Validation::kOk;
}

[[noreturn]] void corrupt(const std::string& why) {
  throw Error(ErrorCode::kCorruptStore, why);
}

}  // namespace

ForwardingEntry make_forwarding_entry(const KeyId& source_key_id,
                                      const ForwardingGrant& grant) {
  return ForwardingEntry{source_key_id, grant.new_keypair.key_id,
                         grant.proxy_factor, grant.source_fingerprint, true};
}

MessageMetadata parse_metadata(std::string_view text) {
  MessageMetadata meta;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto colon = t.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "metadata line without ':': " + t);
    }
    std::string key = trim(std::string_view(t).substr(0, colon));
    std::string value = trim(std::string_view(t).substr(colon + 1));
    if (key == "sender") {
      meta.sender = value;
    } else if (key == "recipient") {
      meta.recipient = value;
    } else {
      meta.headers.emplace_back(std::move(key), std::move(value));
    }
  }
  return meta;
}

FilterRule parse_filter_rule(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string field, pattern, action, scope, extra;
  in >> field >> pattern >> action >> scope >> extra;
  auto bad = [&](const std::string& why) {
    return Error(ErrorCode::kInvalidArgument,
                 "filter rule '" + std::string(text) + "': " + why);
  };
  if (!extra.empty()) throw bad("too many fields");

  FilterRule rule;
  if (field == "sender") {
    rule.field = FilterRule::Field::kSender;
  } else if (field == "recipient") {
    rule.field = FilterRule::Field::kRecipient;
  } else if (field == "header") {
    rule.field = FilterRule::Field::kHeaderName;
  } else {
    throw bad("field must be sender, recipient or header");
  }
  if (pattern.empty()) throw bad("missing pattern");
  rule.pattern = pattern;
  if (action == "forward") {
    rule.action = FilterRule::Action::kForward;
  } else if (action == "drop") {
    rule.action = FilterRule::Action::kDrop;
  } else {
    throw bad("action must be forward or drop");
  }
  if (!scope.empty()) {
    if (scope.rfind("dest=", 0) != 0) throw bad("expected dest=<keyid>");
    rule.dest_key_id = array_from_hex<8>(scope.substr(5));
  }
  return rule;
}

std::string_view entry_outcome_name(EntryOutcome outcome) {
  switch (outcome) {
    case EntryOutcome::kDelivered:
      return "delivered";
    case EntryOutcome::kRejectedSmallSubgroup:
      return "rejected-small-subgroup";
    case EntryOutcome::kRejectedNotInSubgroup:
      return "rejected-not-in-subgroup";
    case EntryOutcome::kFiltered:
      return "filtered";
  }
  return "unknown";
}

std::size_t TransformReport::delivered() const {
  return static_cast<std::size_t>(
      std::count_if(outcomes.begin(), outcomes.end(), [](const auto& o) {
        return o.outcome == EntryOutcome::kDelivered;
      }));
}

std::string TransformReport::to_log(std::string_view message_name) const {
  std::string inputs;
  for (const auto& id : input_key_ids) {
    if (!inputs.empty()) inputs += ',';
    inputs += to_hex(id);
  }
  std::string prefix;
  if (!message_name.empty()) prefix = "message=" + std::string(message_name) + " ";
  prefix += "input=" + inputs;

  std::ostringstream out;
  if (outcomes.empty()) {
    out << prefix << " outcome=no-match " << timing_note << "\n";
    return out.str();
  }
  for (const auto& o : outcomes) {
    out << prefix << " source=" << to_hex(o.source_key_id)
        << " dest=" << to_hex(o.dest_key_id) << " hop=" << o.hop
        << " outcome=" << entry_outcome_name(o.outcome) << " " << timing_note
        << "\n";
  }
  return out.str();
}

// --- Store ----------------------------------------------------------------

Bytes serialize_store(const std::vector<ForwardingEntry>& entries) {
  Bytes out(kStoreMagic.begin(), kStoreMagic.end());
  detail::put_u16(out, kStoreVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(entries.size()));
  for (const auto& e : entries) {
    detail::put_u16(out, kRecordLength);
    detail::append(out, e.source_key_id);
    detail::append(out, e.dest_key_id);
    detail::append(out, e.proxy_factor.value().to_bytes());
    detail::append(out, e.source_fingerprint);
    out.push_back(e.enabled ? 1 : 0);
  }
  const Bytes checksum = detail::digest_by_id(kHashSha256, out);
  detail::append(out, checksum);
  return out;
}

std::vector<ForwardingEntry> parse_store(ByteView data) {
  if (data.empty()) return {};
  if (data.size() < kStoreMagic.size() + 6 + kChecksumLength) {
    corrupt("store file too short");
  }
  const ByteView body = data.first(data.size() - kChecksumLength);
  const ByteView stored = data.last(kChecksumLength);
  const Bytes computed = detail::digest_by_id(kHashSha256, body);
  if (!std::equal(computed.begin(), computed.end(), stored.begin())) {
    corrupt("store checksum mismatch");
  }

  std::vector<ForwardingEntry> entries;
  try {
    detail::ByteReader r(body);
    ByteView magic = r.take(kStoreMagic.size());
    if (!std::equal(magic.begin(), magic.end(), kStoreMagic.begin())) {
      corrupt("bad store magic");
    }
    if (r.u16() != kStoreVersion) corrupt("unsupported store version");
    const std::uint32_t count = r.u32();
    std::set<std::pair<KeyId, KeyId>> seen;
    for (std::uint32_t i = 0; i < count; ++i) {
      if (r.u16() != kRecordLength) corrupt("bad record length");
      KeyId src{}, dst{};
      Fingerprint fp{};
      ScalarBytes k{};
      auto copy = [&](auto& dest) {
        ByteView v = r.take(dest.size());
        std::copy(v.begin(), v.end(), dest.begin());
      };
      copy(src);
      copy(dst);
      copy(k);
      copy(fp);
      const std::uint8_t enabled = r.u8();
      if (enabled > 1) corrupt("bad enabled flag");
      const Scalar value = Scalar::from_bytes(k);
      if (value.to_bytes() != k || value.is_zero()) {
        corrupt("proxy factor out of range");
      }
      if (!seen.emplace(src, dst).second) corrupt("duplicate store entry");
      entries.push_back(
          ForwardingEntry{src, dst, ProxyFactor(value), fp, enabled == 1});
    }
    if (!r.empty()) corrupt("trailing octets in store");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptStore) throw;
    corrupt(std::string("malformed store: ") + e.what());
  }
  return entries;
}

std::vector<ForwardingEntry> store_load(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return {};
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kStorageFailure, "cannot open " + path.string());
  }
  Bytes data((std::istreambuf_iterator<char>(in)),
             std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw Error(ErrorCode::kStorageFailure, "cannot read " + path.string());
  }
  return parse_store(data);
}

void store_save(const std::vector<ForwardingEntry>& entries,
                const std::filesystem::path& path) {
  const Bytes data = serialize_store(entries);
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());

  // Proxy factors are key material: owner-only.
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
  std::FILE* f = fd < 0 ? nullptr : ::fdopen(fd, "wb");
  if (!f) {
    if (fd >= 0) ::close(fd);
    throw Error(ErrorCode::kStorageFailure, "cannot create " + tmp.string());
  }
  bool ok = std::fwrite(data.data(), 1, data.size(), f) == data.size();
  ok = std::fflush(f) == 0 && ok;
  ok = ::fsync(fileno(f)) == 0 && ok;
  ok = std::fclose(f) == 0 && ok;
  std::error_code ec;
  if (ok) std::filesystem::rename(tmp, path, ec);
  if (!ok || ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kStorageFailure, "cannot write " + path.string());
  }
}

// --- Service --------------------------------------------------------------

ProxyService::ProxyService(std::filesystem::path store_path)
    : entries_(store_load(store_path)), store_path_(std::move(store_path)) {}

void ProxyService::persist_locked() const {
  if (store_path_) store_save(entries_, *store_path_);
}

void ProxyService::register_forwarding(const ForwardingEntry& entry) {
  std::unique_lock lock(mutex_);
  for (const auto& e : entries_) {
    if (e.source_key_id == entry.source_key_id &&
        e.dest_key_id == entry.dest_key_id) {
      throw Error(ErrorCode::kDuplicateEntry,
                  "forwarding " + to_hex(entry.source_key_id) + " -> " +
                      to_hex(entry.dest_key_id) + " already registered");
    }
  }
  entries_.push_back(entry);
  try {
    persist_locked();
  } catch (...) {
    entries_.pop_back();
    throw;
  }
}

void ProxyService::revoke_forwarding(const KeyId& source, const KeyId& dest) {
  std::unique_lock lock(mutex_);
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) {
    return e.source_key_id == source && e.dest_key_id == dest;
  });
  if (it == entries_.end()) {
    throw Error(ErrorCode::kNotFound, "no forwarding " + to_hex(source) +
                                          " -> " + to_hex(dest));
  }
  const bool was_enabled = it->enabled;
  it->enabled = false;
  try {
    persist_locked();
  } catch (...) {
    it->enabled = was_enabled;
    throw;
  }
}

void ProxyService::set_filters(std::vector<FilterRule> rules) {
  std::unique_lock lock(mutex_);
  filters_ = std::move(rules);
}

void ProxyService::set_max_depth(int depth) {
  if (depth < 1) throw Error(ErrorCode::kInvalidArgument, "max depth < 1");
  std::unique_lock lock(mutex_);
  max_depth_ = depth;
}

std::vector<ForwardingEntry> ProxyService::entries() const {
  std::shared_lock lock(mutex_);
  return entries_;
}

void ProxyService::save(const std::filesystem::path& path) const {
  std::shared_lock lock(mutex_);
  store_save(entries_, path);
}

ProcessResult ProxyService::process_message(
    std::string_view armored, const MessageMetadata& metadata) const {
  const auto start = std::chrono::steady_clock::now();
  const ArmoredMessage dearmored = dearmor(armored);
  const EncryptedMessage message = parse_message(dearmored.data);

  ProcessResult result;
  for (const auto& p : message.pkesks) {
    result.report.input_key_ids.push_back(p.recipient_key_id);
  }

  std::shared_lock lock(mutex_);

  struct Pending {
    std::size_t pkesk_index;
    Pkesk pkesk;
    int depth;
    // Set for points produced by k * P from an already validated point.
    bool validated;
    std::set<KeyId> visited;
  };
  std::deque<Pending> queue;
  for (std::size_t i = 0; i < message.pkesks.size(); ++i) {
    const auto& p = message.pkesks[i];
    queue.push_back({i, p, 0, false, {p.recipient_key_id}});
  }

  std::map<ScalarBytes, Validation> verdicts;
  while (!queue.empty()) {
    Pending cur = std::move(queue.front());
    queue.pop_front();
    if (cur.depth >= max_depth_) continue;

    for (const auto& entry : entries_) {
      if (!entry.enabled ||
          entry.source_key_id != cur.pkesk.recipient_key_id ||
          cur.visited.count(entry.dest_key_id)) {
        continue;
      }
      OutcomeRecord record{entry.source_key_id, entry.dest_key_id,
                           cur.depth + 1, EntryOutcome::kDelivered};

      if (!passes_filters(filters_, metadata, entry.dest_key_id)) {
        record.outcome = EntryOutcome::kFiltered;
        result.report.outcomes.push_back(record);
        continue;
      }

      Validation verdict = Validation::kOk;
      if (!cur.validated) {
        const ScalarBytes key = cur.pkesk.ephemeral.bytes();
        auto it = verdicts.find(key);
        if (it == verdicts.end()) {
          it = verdicts.emplace(key, validate_point(cur.pkesk.ephemeral)).first;
        }
        verdict = it->second;
      }
      if (verdict == Validation::kLowOrder) {
        record.outcome = EntryOutcome::kRejectedSmallSubgroup;
        result.report.outcomes.push_back(record);
        continue;
      }
      if (verdict == Validation::kNotInSubgroup) {
        record.outcome = EntryOutcome::kRejectedNotInSubgroup;
        result.report.outcomes.push_back(record);
        continue;
      }

      const CurvePoint transformed =
          scalar_mul(entry.proxy_factor.value(), cur.pkesk.ephemeral);
      Pkesk rewritten =
          rewrite_pkesk(cur.pkesk, transformed, entry.dest_key_id);

      EncryptedMessage out = message;
      out.pkesks[cur.pkesk_index] = rewritten;
      result.outputs.push_back(
          {entry.dest_key_id,
           armor(serialize_message(out), kArmorMessage)});
      result.report.outcomes.push_back(record);

      Pending next{cur.pkesk_index, std::move(rewritten), cur.depth + 1, true,
                   cur.visited};
      next.visited.insert(entry.dest_key_id);
      queue.push_back(std::move(next));
    }
  }

  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  const long bucket = (elapsed.count() / 10 + 1) * 10;
  result.report.timing_note = "elapsed_ms<=" + std::to_string(bucket);
  return result;
}

// --- Batch ingestion ------------------------------------------------------

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
}

}  // namespace

BatchSummary run_batch(const ProxyService& service,
                       const std::filesystem::path& in_dir,
                       const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(in_dir, ec)) {
    throw Error(ErrorCode::kIoFailure, "not a directory: " + in_dir.string());
  }
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoFailure, "cannot create " + out_dir.string());
  }

  std::vector<fs::path> inputs;
  for (const auto& item : fs::directory_iterator(in_dir)) {
    if (item.is_regular_file() && item.path().extension() == ".asc") {
      inputs.push_back(item.path());
    }
  }
  std::sort(inputs.begin(), inputs.end());

  BatchSummary summary;
  for (const auto& path : inputs) {
    ++summary.messages;
    const std::string name = path.filename().string();
    try {
      MessageMetadata meta;
      fs::path sidecar = path;
      sidecar.replace_extension(".meta");
      if (fs::exists(sidecar)) meta = parse_metadata(read_text(sidecar));

      ProcessResult r = service.process_message(read_text(path), meta);
      for (const auto& out : r.outputs) {
        fs::path dir = out_dir / to_hex(out.dest_key_id);
        fs::create_directories(dir, ec);
        write_text(dir / name, out.armored);
        ++summary.outputs;
      }
      std::istringstream lines(r.report.to_log(name));
      for (std::string line; std::getline(lines, line);) {
        summary.report_lines.push_back(line);
      }
    } catch (const Error& e) {
      ++summary.failed;
      summary.report_lines.push_back(
          "message=" + name + " outcome=error code=" +
          std::string(error_code_name(e.code())));
    }
  }

  std::string report;
  for (const auto& line : summary.report_lines) report += line + "\n";
  write_text(out_dir / "report.log", report);
  return summary;
}

}  // namespace pgpfwd
