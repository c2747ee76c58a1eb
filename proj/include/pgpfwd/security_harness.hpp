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

// Executable checks for the security argument: the proxy as a
// multiplication oracle, the collusion identity d_i * k_i = d_B, and the
// real-versus-simulated views of the proxy and forwardees compared with a
// two-sample Kolmogorov-Smirnov test. The KS test is a distribution-level
// sanity check; it cannot establish computational indistinguishability.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pgpfwd/bytes.hpp"
#include "pgpfwd/curve_group.hpp"
#include "pgpfwd/forwarding.hpp"
#include "pgpfwd/proxy_service.hpp"
#include "pgpfwd/random.hpp"
#include "pgpfwd/scalar_field.hpp"

namespace pgpfwd {

// --- Multiplication oracle --------------------------------------------------

struct OracleQuery {
  CurvePoint query;
  // k * query as returned by the proxy; empty when the proxy refused.
  std::optional<CurvePoint> response;
};

struct OracleTranscript {
  // Forwardee whose factor answered, i.e. the first-hop destination.
  KeyId factor_id{};
  std::vector<OracleQuery> queries;

  std::size_t answered() const;
};

// Submits one message to `source_key_id` whose PKESK carries `point` and a
// random wrapped key and payload, and returns what the proxy emitted for
// `factor_id`.
OracleQuery oracle_query(const ProxyService& proxy, const KeyId& source_key_id,
                         const KeyId& factor_id, const CurvePoint& point,
                         RandomSource& rng);

// n_queries points d~ * G with d~ drawn like a private key.
OracleTranscript oracle_adversary(const ProxyService& proxy,
                                  const KeyId& source_key_id,
                                  const KeyId& factor_id,
                                  std::size_t n_queries, RandomSource& rng);

// d_i * k_i mod n, which is d_B mod n for a matching pair.
Scalar collusion_recover(const ClampedSecret& forwardee_secret,
                         const ProxyFactor& k);

// --- Views ------------------------------------------------------------------

enum class ViewRole { kProxy, kForwardee, kEavesdropper };

std::string_view view_role_name(ViewRole role);

using ViewValue = std::variant<Scalar, CurvePoint, Bytes>;

struct ViewElement {
  std::string label;
  ViewValue value;
};

struct SimulatedView {
  ViewRole role = ViewRole::kProxy;
  std::vector<ViewElement> elements;

  // "label:kind" per element, kind being scalar, point or octets.
  std::vector<std::string> shape() const;
  const ViewElement& at(std::string_view label) const;
};

struct ForwardeeRun {
  ClampedSecret secret;
  ProxyFactor factor;
  CurvePoint transformed;                   // P_i
  std::vector<CurvePoint> queries;          // X_ij chosen by this forwardee
  std::vector<CurvePoint> query_responses;  // k_i * X_lj over all l, j
};

// One execution of the forwarding protocol through a real ProxyService:
// Bob's key, m grants, Alice's message, and every forwardee's oracle
// queries.
struct ProtocolRun {
  CurvePoint bob_public;   // Q_B = d_B G
  CurvePoint ephemeral;    // P_B = d_A G
  Bytes ciphertext;        // c, the sealed payload
  std::vector<ForwardeeRun> forwardees;
};

ProtocolRun run_protocol(RandomSource& rng, std::size_t forwardees = 2,
                         std::size_t queries_per_forwardee = 1);

// Proxy:        c, P_B, k_1..k_m, (X_ij)
// Forwardee i:  (X_ij); c, d_i, P_i, (k_i X_lj)
// Eavesdropper: forwardee i plus the eavesdropped d_A G and Bob's d_B G
SimulatedView build_real_view(ViewRole role, const ProtocolRun& run,
                              std::size_t forwardee = 0);

// Proxy:        c, yG, x_i z_i^{-1}, random X~_ij
// Forwardee:    identical to the real view (inputs and outputs only)
// Eavesdropper: real forwardee view with d_A G, d_B G replaced by xG, yG
// All fresh scalars are drawn like private keys.
SimulatedView build_sim_view(ViewRole role, const ProtocolRun& run,
                             RandomSource& rng, std::size_t forwardee = 0);

// --- Statistics -------------------------------------------------------------

inline constexpr std::size_t kMinKsSamples = 1000;

// Scalars map to value / n, points to u / p, octet strings to their first
// eight octets read big-endian / 2^64.
double to_unit_interval(const ViewValue& value);

struct KsResult {
  double statistic = 0;  // sup |F_real - F_sim|
  double p_value = 1;
  bool pass = true;      // p_value > alpha
};

// Two-sample KS test with the asymptotic Kolmogorov distribution and
// Stephens' small-sample correction. Throws kInsufficientSamples when either
// side has fewer than kMinKsSamples values.
KsResult distinguisher_test(std::vector<double> real, std::vector<double> sim,
                            double alpha = 0.01);

// Survival function of the Kolmogorov distribution, Q(lambda).
double kolmogorov_sf(double lambda);

// --- Scenario runner ----------------------------------------------------------

struct HarnessLine {
  std::string scenario;
  std::size_t samples = 0;
  double statistic = 0;
  double p_value = 1;
  bool pass = true;

  // "scenario=... samples=... statistic=... p_value=... verdict=pass|fail"
  std::string to_string() const;
};

// Runs every scenario: collusion identity, oracle transcript versus random
// subgroup points, and each element family of the proxy, forwardee and
// eavesdropper views (real versus simulated).
std::vector<HarnessLine> run_harness(std::size_t samples, std::uint64_t seed,
                                     double alpha = 0.01);

}  // namespace pgpfwd
