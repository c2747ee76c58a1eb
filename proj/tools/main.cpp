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

#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"

namespace {

constexpr const char* kSeedHelp =
    "UNSAFE, testing only: derive all randomness from this seed";

void warn_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) {
    std::cerr << "warning: --seed makes keys and nonces predictable; "
                 "never use it for real mail\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace pgpfwd::cli;

  CLI::App app{"pgpfwd: forwarding of ECDH-encrypted mail through a proxy"};
  app.require_subcommand(1);

  GenKeyOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-key", "generate an ECDH key pair");
  gen_cmd->add_option("--out-dir", gen.out_dir, "directory for <keyid>.pub/.sec");
  gen_cmd->add_option("--seed", gen.seed, kSeedHelp);
  gen_cmd->add_flag("--force", gen.force, "overwrite existing files");

  SetupForwardOptions setup;
  auto* setup_cmd = app.add_subcommand(
      "setup-forward", "issue a forwardee key and a proxy factor");
  setup_cmd->add_option("--source-secret", setup.source_secret,
                        "secret key of the forwarding recipient")
      ->required();
  setup_cmd->add_option("--out-dir", setup.out_dir,
                        "directory for the forwardee key and factor file");
  setup_cmd->add_option("--registry", setup.registry,
                        "issued-key registry (default <keyid>.grants next to "
                        "the source secret)");
  setup_cmd->add_option("--seed", setup.seed, kSeedHelp);
  setup_cmd->add_flag("--force", setup.force, "overwrite existing files");

  EncryptOptions enc;
  auto* enc_cmd = app.add_subcommand("encrypt", "encrypt a file to a key");
  enc_cmd->add_option("--to", enc.recipient, "recipient .pub file")->required();
  enc_cmd->add_option("--in", enc.in, "plaintext file")->required();
  enc_cmd->add_option("--out", enc.out, "armored message output")->required();
  enc_cmd->add_option("--seed", enc.seed, kSeedHelp);
  enc_cmd->add_flag("--force", enc.force, "overwrite the output");

  DecryptOptions dec;
  auto* dec_cmd = app.add_subcommand("decrypt", "decrypt a message");
  dec_cmd->add_option("--key", dec.key, "own .sec file")->required();
  dec_cmd->add_option("--in", dec.in, "armored message")->required();
  dec_cmd->add_option("--out", dec.out, "plaintext output, - for stdout")
      ->required();
  dec_cmd->add_flag("--force", dec.force, "overwrite the output");

  ProxyRunOptions run;
  auto* run_cmd = app.add_subcommand(
      "proxy-run", "manage the forwarding store and transform a mail batch");
  run_cmd->add_option("--store", run.store,
                      std::string("store file (default $") + kStoreEnv +
                          ", then ./" + kDefaultStore + ")");
  run_cmd->add_option("--add-factor", run.add_factors,
                      "register a factor file from setup-forward");
  run_cmd->add_option("--revoke", run.revoke,
                      "disable <source keyid>:<dest keyid>");
  run_cmd->add_option("--filter", run.filters,
                      "\"sender|recipient|header <glob> forward|drop "
                      "[dest=<keyid>]\"");
  run_cmd->add_option("--filter-file", run.filter_file, "one rule per line");
  run_cmd->add_option("--max-depth", run.max_depth, "forwarding chain limit");
  run_cmd->add_option("--in-dir", run.in_dir, "incoming *.asc (+ .meta)");
  run_cmd->add_option("--out-dir", run.out_dir,
                      "per-destination outputs and report.log");

  InspectOptions insp;
  auto* insp_cmd = app.add_subcommand(
      "inspect", "show packet fields of a message, key, factor or store");
  insp_cmd->add_option("file", insp.in, "file to inspect")->required();

  HarnessOptions harn;
  auto* harn_cmd = app.add_subcommand(
      "harness", "run the statistical security scenarios");
  harn_cmd->add_option("--samples", harn.samples, "samples per family");
  harn_cmd->add_option("--seed", harn.seed, "deterministic scenario seed");
  harn_cmd->add_option("--alpha", harn.alpha, "KS significance level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) {
      warn_seed(gen.seed);
      return cmd_gen_key(gen, std::cout);
    }
    if (*setup_cmd) {
      warn_seed(setup.seed);
      return cmd_setup_forward(setup, std::cout);
    }
    if (*enc_cmd) {
      warn_seed(enc.seed);
      return cmd_encrypt(enc, std::cout);
    }
    if (*dec_cmd) return cmd_decrypt(dec, std::cout);
    if (*run_cmd) return cmd_proxy_run(run, std::cout);
    if (*insp_cmd) return cmd_inspect(insp, std::cout);
    if (*harn_cmd) return cmd_harness(harn, std::cout);
  } catch (const pgpfwd::Error& e) {
    std::cerr << "pgpfwd: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "pgpfwd: " << e.what() << "\n";
    return exit_code_for(pgpfwd::ErrorCode::kIoFailure);
  }
  return kExitUsage;
}
