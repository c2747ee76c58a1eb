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

// Command implementations behind the pgpfwd tool. main.cpp only parses
// flags; everything here takes an options struct and an output stream so
// the tests can drive it directly.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pgpfwd/errors.hpp"
#include "pgpfwd/forwarding.hpp"
#include "pgpfwd/proxy_service.hpp"
#include "pgpfwd/random.hpp"

namespace pgpfwd::cli {

namespace fs = std::filesystem;

// Exit codes. Library failures exit with their ErrorCode value (1..21).
inline constexpr int kExitOk = 0;
inline constexpr int kExitHarnessFailed = 30;  // a scenario verdict was fail
inline constexpr int kExitBatchIncomplete = 31;  // proxy-run skipped input
inline constexpr int kExitUsage = 64;

int exit_code_for(ErrorCode code);

inline constexpr const char* kStoreEnv = "PGPFWD_STORE";
inline constexpr const char* kDefaultStore = "pgpfwd.store";

// --store flag, else $PGPFWD_STORE, else ./pgpfwd.store.
fs::path resolve_store_path(const std::optional<fs::path>& flag);

// --- Key files ----------------------------------------------------------------

// <keyid>.pub is an armored public subkey packet, <keyid>.sec an armored
// secret subkey packet written 0600.
struct KeyFiles {
  fs::path public_file;
  fs::path secret_file;
};

KeyFiles write_key_files(const KeyPair& key, const fs::path& dir, bool force);

// Accepts a .pub or a .sec file; only the public half is returned.
PublicKeyMaterial load_public_key(const fs::path& path);
KeyPair load_secret_key(const fs::path& path);

// Text file handed to the proxy operator, written 0600:
//   source-key-id / dest-key-id / source-fingerprint / proxy-factor
std::string format_factor_file(const ForwardingEntry& entry);
ForwardingEntry parse_factor_file(std::string_view text);

// Writes via a sibling temp file and rename. Refuses to replace an existing
// file unless `force`.
void write_file(const fs::path& path, std::string_view data, bool force,
                unsigned mode = 0644);
std::string read_file(const fs::path& path);

// SeededRandom for --seed (never for real keys), SystemRandom otherwise.
std::unique_ptr<RandomSource> make_rng(const std::optional<std::uint64_t>& seed);

// --- Commands -----------------------------------------------------------------

struct GenKeyOptions {
  fs::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool force = false;
};

struct SetupForwardOptions {
  fs::path source_secret;
  fs::path out_dir = ".";
  // Public points of every forwardee key issued for a source, one per line.
  // Defaults to <source secret dir>/<source keyid>.grants.
  std::optional<fs::path> registry;
  std::optional<std::uint64_t> seed;
  bool force = false;
};

struct EncryptOptions {
  fs::path recipient;
  fs::path in;
  fs::path out;
  std::optional<std::uint64_t> seed;
  bool force = false;
};

struct DecryptOptions {
  fs::path key;
  fs::path in;
  fs::path out;  // "-" writes the plaintext to the output stream
  bool force = false;
};

struct ProxyRunOptions {
  std::optional<fs::path> store;
  std::vector<fs::path> add_factors;
  std::vector<std::string> revoke;  // "<source keyid>:<dest keyid>"
  std::vector<std::string> filters;
  std::optional<fs::path> filter_file;
  int max_depth = ProxyService::kDefaultMaxDepth;
  std::optional<fs::path> in_dir;
  std::optional<fs::path> out_dir;
};

struct InspectOptions {
  fs::path in;
};

struct HarnessOptions {
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  double alpha = 0.01;
};

int cmd_gen_key(const GenKeyOptions& opt, std::ostream& out);
int cmd_setup_forward(const SetupForwardOptions& opt, std::ostream& out);
int cmd_encrypt(const EncryptOptions& opt, std::ostream& out);
int cmd_decrypt(const DecryptOptions& opt, std::ostream& out);
int cmd_proxy_run(const ProxyRunOptions& opt, std::ostream& out);
int cmd_inspect(const InspectOptions& opt, std::ostream& out);
int cmd_harness(const HarnessOptions& opt, std::ostream& out);

}  // namespace pgpfwd::cli
