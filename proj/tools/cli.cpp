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

#include "cli.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <system_error>

#include "digest.hpp"
#include "pgpfwd/armor.hpp"
#include "pgpfwd/pgp_codec.hpp"
#include "pgpfwd/security_harness.hpp"
#include "pgpfwd/session_crypto.hpp"

namespace pgpfwd::cli {

int exit_code_for(ErrorCode code) { return static_cast<int>(code); }

fs::path resolve_store_path(const std::optional<fs::path>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kStoreEnv); env && *env) return env;
  return kDefaultStore;
}

// --- Files ----------------------------------------------------------------

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIoFailure, "cannot read " + path.string());
  return ss.str();
}

void write_file(const fs::path& path, std::string_view data, bool force,
                unsigned mode) {
  std::error_code ec;
  if (!force && fs::exists(path, ec)) {
    throw Error(ErrorCode::kIoFailure,
                path.string() + " exists (use --force to overwrite)");
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC,
                        static_cast<mode_t>(mode));
  if (fd < 0) throw Error(ErrorCode::kIoFailure, "cannot create " + tmp.string());
  // open() is subject to the umask and O_TRUNC keeps an old mode.
  bool ok = ::fchmod(fd, static_cast<mode_t>(mode)) == 0;
  std::size_t done = 0;
  while (ok && done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n <= 0) {
      ok = false;
      break;
    }
    done += static_cast<std::size_t>(n);
  }
  ok = ok && ::fsync(fd) == 0;
  ok = ::close(fd) == 0 && ok;
  if (ok) fs::rename(tmp, path, ec);
  if (!ok || ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  }
}

std::unique_ptr<RandomSource> make_rng(
    const std::optional<std::uint64_t>& seed) {
  if (seed) return std::make_unique<SeededRandom>(*seed);
  return std::make_unique<SystemRandom>();
}

namespace {

Packet single_packet(const std::string& text, std::string_view label,
                     std::uint8_t tag, const fs::path& path) {
  ArmoredMessage a = dearmor(text);
  if (a.label != label) {
    throw Error(ErrorCode::kBadFraming,
                path.string() + ": expected " + std::string(label));
  }
  std::vector<Packet> packets = parse_packets(a.data);
  if (packets.size() != 1 || packets[0].tag != tag) {
    throw Error(ErrorCode::kMalformedPacket,
                path.string() + ": expected one key packet");
  }
  return packets[0];
}

std::string key_comment(const KeyPair& key) {
  return to_hex(key.fingerprint);
}

const char* hash_name(std::uint8_t id) {
  switch (id) {
    case kHashSha256: return "sha256";
    case kHashSha384: return "sha384";
    case kHashSha512: return "sha512";
    default: return "unknown";
  }
}

const char* sym_name(std::uint8_t id) {
  switch (id) {
    case kSymAes128: return "aes128";
    case kSymAes192: return "aes192";
    case kSymAes256: return "aes256";
    default: return "unknown";
  }
}

std::string describe_kdf(const KdfParams& kdf) {
  std::ostringstream s;
  s << "kdf=v" << int(kdf.version) << " hash=" << hash_name(kdf.hash_id)
    << " sym=" << sym_name(kdf.sym_id);
  if (kdf.version == 2) {
    s << " flags=" << std::hex << std::setw(2) << std::setfill('0')
      << int(kdf.flags) << std::dec;
  }
  if (kdf.replacement_fingerprint) {
    s << " kdf-fingerprint=" << to_hex(*kdf.replacement_fingerprint);
  }
  return s.str();
}

void print_key(std::ostream& out, const PublicKeyMaterial& key) {
  const Fingerprint fp = fingerprint(key);
  out << "fingerprint=" << to_hex(fp) << "\n"
      << "key-id=" << to_hex(key_id_of(fp)) << "\n"
      << "public=" << key.public_point.to_hex() << "\n"
      << describe_kdf(key.kdf) << "\n";
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <std::size_t N>
std::array<std::uint8_t, N> fixed_hex(const std::string& value,
                                      std::string_view what) {
  if (value.size() != 2 * N) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " must be " + std::to_string(2 * N) +
                    " hex characters");
  }
  Bytes b = from_hex(value);
  std::array<std::uint8_t, N> out{};
  std::copy(b.begin(), b.end(), out.begin());
  return out;
}

KeyId parse_key_id(const std::string& s) { return fixed_hex<8>(s, "key id"); }

}  // namespace

KeyFiles write_key_files(const KeyPair& key, const fs::path& dir, bool force) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + dir.string());

  KeyFiles files{dir / (to_hex(key.key_id) + ".pub"),
                 dir / (to_hex(key.key_id) + ".sec")};
  if (!force) {
    for (const auto& p : {files.public_file, files.secret_file}) {
      if (fs::exists(p, ec)) {
        throw Error(ErrorCode::kIoFailure,
                    p.string() + " exists (use --force to overwrite)");
      }
    }
  }
  const std::vector<std::pair<std::string, std::string>> headers = {
      {"Comment", key_comment(key)}};

  Bytes sec = serialize_packet(
      kTagSecretSubkey,
      serialize_secret_key_body({key.public_key, key.secret}));
  std::string sec_text = armor(sec, kArmorPrivateKey, headers);
  secure_zero(sec);
  try {
    write_file(files.secret_file, sec_text, force, 0600);
  } catch (...) {
    secure_zero({reinterpret_cast<std::uint8_t*>(sec_text.data()),
                 sec_text.size()});
    throw;
  }
  secure_zero(
      {reinterpret_cast<std::uint8_t*>(sec_text.data()), sec_text.size()});

  write_file(files.public_file,
             armor(serialize_packet(kTagPublicSubkey,
                                    serialize_public_key_body(key.public_key)),
                   kArmorPublicKey, headers),
             force, 0644);
  return files;
}

PublicKeyMaterial load_public_key(const fs::path& path) {
  const std::string text = read_file(path);
  ArmoredMessage a = dearmor(text);
  if (a.label == kArmorPrivateKey) return load_secret_key(path).public_key;
  Packet p = single_packet(text, kArmorPublicKey, kTagPublicSubkey, path);
  return parse_public_key_body(p.body);
}

KeyPair load_secret_key(const fs::path& path) {
  std::string text = read_file(path);
  Packet p = single_packet(text, kArmorPrivateKey, kTagSecretSubkey, path);
  secure_zero({reinterpret_cast<std::uint8_t*>(text.data()), text.size()});
  SecretKeyMaterial m = parse_secret_key_body(p.body);
  secure_zero(p.body);
  KeyPair key = keypair_from_secret(m.secret, m.public_key.kdf);
  if (key.public_key != m.public_key) {
    throw Error(ErrorCode::kMalformedPacket,
                path.string() + ": public point does not match secret");
  }
  return key;
}

std::string format_factor_file(const ForwardingEntry& entry) {
  std::ostringstream s;
  s << "# pgpfwd proxy factor: give to the proxy operator only\n"
    << "source-key-id: " << to_hex(entry.source_key_id) << "\n"
    << "dest-key-id: " << to_hex(entry.dest_key_id) << "\n"
    << "source-fingerprint: " << to_hex(entry.source_fingerprint) << "\n"
    << "proxy-factor: " << entry.proxy_factor.value().to_hex() << "\n";
  return s.str();
}

ForwardingEntry parse_factor_file(std::string_view text) {
  std::map<std::string, std::string> fields;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto colon = t.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "factor file: bad line");
    }
    fields[trim(t.substr(0, colon))] = trim(t.substr(colon + 1));
  }
  auto get = [&](const char* name) {
    auto it = fields.find(name);
    if (it == fields.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("factor file: missing ") + name);
    }
    return it->second;
  };
  const std::string k_hex = get("proxy-factor");
  const auto k_bytes = fixed_hex<32>(k_hex, "proxy-factor");
  const Scalar k = Scalar::from_bytes(k_bytes);
  if (k.to_bytes() != k_bytes) {
    throw Error(ErrorCode::kInvalidArgument,
                "factor file: proxy-factor is not reduced mod n");
  }
  ForwardingEntry e{parse_key_id(get("source-key-id")),
                    parse_key_id(get("dest-key-id")), ProxyFactor(k),
                    fixed_hex<20>(get("source-fingerprint"),
                                  "source-fingerprint"),
                    true};
  return e;
}

// --- Commands ---------------------------------------------------------------

int cmd_gen_key(const GenKeyOptions& opt, std::ostream& out) {
  auto rng = make_rng(opt.seed);
  KeyPair key = generate_keypair(*rng);
  KeyFiles files = write_key_files(key, opt.out_dir, opt.force);
  out << "fingerprint=" << to_hex(key.fingerprint) << "\n"
      << "key-id=" << to_hex(key.key_id) << "\n"
      << "public-file=" << files.public_file.string() << "\n"
      << "secret-file=" << files.secret_file.string() << "\n";
  return kExitOk;
}

int cmd_setup_forward(const SetupForwardOptions& opt, std::ostream& out) {
  const KeyPair source = load_secret_key(opt.source_secret);
  const fs::path registry =
      opt.registry ? *opt.registry
                   : opt.source_secret.parent_path() /
                         (to_hex(source.key_id) + ".grants");

  std::set<std::string> issued;
  {
    std::error_code ec;
    if (fs::exists(registry, ec)) {
      std::istringstream in(read_file(registry));
      std::string line;
      while (std::getline(in, line)) {
        if (!trim(line).empty()) issued.insert(trim(line));
      }
    }
  }

  auto rng = make_rng(opt.seed);
  // A repeated forwardee secret would let two forwardees share one k.
  std::optional<ForwardingGrant> grant;
  for (int attempt = 0; attempt < 16 && !grant; ++attempt) {
    ForwardingGrant g = setup_forwarding(source.secret, source.fingerprint,
                                         *rng, source.public_key.kdf.hash_id,
                                         source.public_key.kdf.sym_id);
    if (!issued.count(g.new_keypair.public_point().to_hex())) grant = g;
  }
  if (!grant) {
    throw Error(ErrorCode::kDuplicateEntry,
                "could not draw a forwardee key not already in " +
                    registry.string());
  }

  const ForwardingEntry entry = make_forwarding_entry(source.key_id, *grant);
  const fs::path factor_file =
      opt.out_dir / (to_hex(entry.source_key_id) + "-" +
                     to_hex(entry.dest_key_id) + ".factor");
  std::error_code ec;
  if (!opt.force && fs::exists(factor_file, ec)) {
    throw Error(ErrorCode::kIoFailure,
                factor_file.string() + " exists (use --force to overwrite)");
  }
  KeyFiles files = write_key_files(grant->new_keypair, opt.out_dir, opt.force);
  write_file(factor_file, format_factor_file(entry), opt.force, 0600);

  std::string reg_text;
  for (const auto& u : issued) reg_text += u + "\n";
  reg_text += grant->new_keypair.public_point().to_hex() + "\n";
  write_file(registry, reg_text, /*force=*/true, 0644);

  out << "source-key-id=" << to_hex(source.key_id) << "\n"
      << "fingerprint=" << to_hex(grant->new_keypair.fingerprint) << "\n"
      << "key-id=" << to_hex(grant->new_keypair.key_id) << "\n"
      << "public-file=" << files.public_file.string() << "\n"
      << "secret-file=" << files.secret_file.string() << "\n"
      << "factor-file=" << factor_file.string() << "\n";
  return kExitOk;
}

int cmd_encrypt(const EncryptOptions& opt, std::ostream& out) {
  const PublicKeyMaterial recipient = load_public_key(opt.recipient);
  const std::string plaintext = read_file(opt.in);
  auto rng = make_rng(opt.seed);
  const Bytes msg = encrypt_message(recipient, as_bytes(plaintext), *rng);
  write_file(opt.out, armor(msg, kArmorMessage), opt.force);
  out << "recipient=" << to_hex(key_id_of(fingerprint(recipient))) << "\n"
      << "out=" << opt.out.string() << "\n";
  return kExitOk;
}

int cmd_decrypt(const DecryptOptions& opt, std::ostream& out) {
  const KeyPair key = load_secret_key(opt.key);
  ArmoredMessage a = dearmor(read_file(opt.in));
  if (a.label != kArmorMessage) {
    throw Error(ErrorCode::kBadFraming, opt.in.string() + ": not a message");
  }
  Bytes plaintext = decrypt_message(key, a.data);
  if (opt.out == "-") {
    out << to_string(plaintext);
  } else {
    write_file(opt.out, to_string(plaintext), opt.force, 0600);
  }
  secure_zero(plaintext);
  return kExitOk;
}

int cmd_proxy_run(const ProxyRunOptions& opt, std::ostream& out) {
  if (opt.in_dir.has_value() != opt.out_dir.has_value()) {
    throw Error(ErrorCode::kInvalidArgument,
                "--in-dir and --out-dir go together");
  }
  const fs::path store = resolve_store_path(opt.store);
  ProxyService service(store);
  service.set_max_depth(opt.max_depth);

  for (const auto& f : opt.add_factors) {
    const ForwardingEntry e = parse_factor_file(read_file(f));
    service.register_forwarding(e);
    out << "registered source=" << to_hex(e.source_key_id)
        << " dest=" << to_hex(e.dest_key_id) << "\n";
  }
  for (const auto& r : opt.revoke) {
    const auto colon = r.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "--revoke takes <source keyid>:<dest keyid>");
    }
    const KeyId src = parse_key_id(r.substr(0, colon));
    const KeyId dst = parse_key_id(r.substr(colon + 1));
    service.revoke_forwarding(src, dst);
    out << "revoked source=" << to_hex(src) << " dest=" << to_hex(dst) << "\n";
  }

  std::vector<FilterRule> rules;
  if (opt.filter_file) {
    std::istringstream in(read_file(*opt.filter_file));
    std::string line;
    while (std::getline(in, line)) {
      const std::string t = trim(line);
      if (!t.empty() && t[0] != '#') rules.push_back(parse_filter_rule(t));
    }
  }
  for (const auto& f : opt.filters) rules.push_back(parse_filter_rule(f));
  service.set_filters(std::move(rules));

  if (!opt.in_dir) return kExitOk;

  BatchSummary summary = run_batch(service, *opt.in_dir, *opt.out_dir);
  std::size_t rejected = 0;
  for (const auto& line : summary.report_lines) {
    if (line.find("outcome=rejected") != std::string::npos) ++rejected;
  }
  out << "messages=" << summary.messages << " outputs=" << summary.outputs
      << " failed=" << summary.failed << " rejected=" << rejected
      << " report=" << (*opt.out_dir / "report.log").string() << "\n";
  return summary.failed == 0 && rejected == 0 ? kExitOk : kExitBatchIncomplete;
}

namespace {

void inspect_message(std::ostream& out, ByteView data) {
  EncryptedMessage m = parse_message(data);
  out << "type=message\n";
  for (std::size_t i = 0; i < m.pkesks.size(); ++i) {
    const Pkesk& p = m.pkesks[i];
    out << "pkesk[" << i << "] version=" << int(p.version)
        << " recipient=" << to_hex(p.recipient_key_id)
        << " algorithm=" << int(p.pk_algorithm)
        << " curve-oid=" << to_hex(p.curve_oid)
        << " ephemeral=" << p.ephemeral.to_hex()
        << " wrapped-key=" << to_hex(p.wrapped_session_key) << "\n";
  }
  out << "payload octets=" << m.sealed_payload.size();
  if (m.sealed_payload.size() >= 2) {
    out << " version=" << int(m.sealed_payload[0])
        << " sym=" << sym_name(m.sealed_payload[1]);
  }
  out << " sha256="
      << to_hex(detail::digest_by_id(kHashSha256, m.sealed_payload)) << "\n";
}

void inspect_store(std::ostream& out, ByteView data) {
  std::vector<ForwardingEntry> entries = parse_store(data);
  out << "type=store entries=" << entries.size() << "\n";
  for (const auto& e : entries) {
    out << "entry source=" << to_hex(e.source_key_id)
        << " dest=" << to_hex(e.dest_key_id)
        << " source-fingerprint=" << to_hex(e.source_fingerprint)
        << " enabled=" << (e.enabled ? "yes" : "no") << "\n";
  }
}

}  // namespace

int cmd_inspect(const InspectOptions& opt, std::ostream& out) {
  std::string text = read_file(opt.in);
  const ByteView raw = as_bytes(text);

  if (text.rfind("-----BEGIN ", 0) == 0) {
    ArmoredMessage a = dearmor(text);
    if (a.label == kArmorMessage) {
      inspect_message(out, a.data);
    } else if (a.label == kArmorPublicKey) {
      Packet p = single_packet(text, kArmorPublicKey, kTagPublicSubkey, opt.in);
      out << "type=public-key\n";
      print_key(out, parse_public_key_body(p.body));
    } else if (a.label == kArmorPrivateKey) {
      KeyPair key = load_secret_key(opt.in);
      out << "type=secret-key\n";
      print_key(out, key.public_key);
      out << "secret=present (not shown)\n";
      secure_zero(a.data);
    } else {
      throw Error(ErrorCode::kBadFraming, "unknown armor label " + a.label);
    }
  } else if (text.rfind("PGPFWDST", 0) == 0 || text.empty()) {
    inspect_store(out, raw);
  } else if (text.find("proxy-factor:") != std::string::npos) {
    ForwardingEntry e = parse_factor_file(text);
    out << "type=proxy-factor\n"
        << "source-key-id=" << to_hex(e.source_key_id) << "\n"
        << "dest-key-id=" << to_hex(e.dest_key_id) << "\n"
        << "source-fingerprint=" << to_hex(e.source_fingerprint) << "\n"
        << "proxy-factor=present (not shown)\n";
  } else {
    inspect_message(out, raw);
  }
  secure_zero({reinterpret_cast<std::uint8_t*>(text.data()), text.size()});
  return kExitOk;
}

int cmd_harness(const HarnessOptions& opt, std::ostream& out) {
  bool all_pass = true;
  for (const auto& line : run_harness(opt.samples, opt.seed, opt.alpha)) {
    out << line.to_string() << "\n";
    all_pass = all_pass && line.pass;
  }
  return all_pass ? kExitOk : kExitHarnessFailed;
}

}  // namespace pgpfwd::cli
