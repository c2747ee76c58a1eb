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

#include "pgpfwd/security_harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

#include "pgpfwd/armor.hpp"
#include "pgpfwd/errors.hpp"
#include "pgpfwd/pgp_codec.hpp"
#include "pgpfwd/session_crypto.hpp"

namespace pgpfwd {

namespace {

Bytes random_octets(RandomSource& rng, std::size_t n) {
  Bytes b(n);
  rng.fill(b);
  return b;
}

// Ciphertext-shaped filler: a wrapped key and a sealed payload that nobody
// can open. The proxy only looks at the PKESK header fields.
std::string adversarial_message(const KeyId& to, const CurvePoint& point,
                                RandomSource& rng) {
  EncryptedMessage m;
  Pkesk p;
  p.recipient_key_id = to;
  p.ephemeral = point;
  p.wrapped_session_key = random_octets(rng, 40);
  m.pkesks.push_back(std::move(p));
  m.sealed_payload = {0x01, kSymAes256};
  Bytes body = random_octets(rng, 12 + 32 + 16);
  m.sealed_payload.insert(m.sealed_payload.end(), body.begin(), body.end());
  return armor(serialize_message(m), kArmorMessage);
}

std::optional<CurvePoint> response_for(const ProcessResult& r,
                                       const KeyId& dest) {
  for (const auto& out : r.outputs) {
    if (out.dest_key_id == dest) {
      return parse_message(dearmor(out.armored).data).pkesks[0].ephemeral;
    }
  }
  return std::nullopt;
}

long double le_to_long_double(std::span<const std::uint8_t, 32> bytes) {
  long double v = 0;
  for (int i = 31; i >= 0; --i) v = v * 256.0L + bytes[i];
  return v;
}

const long double kOrderLd = [] {
  return le_to_long_double(group_order_bytes());
}();

const long double kPrimeLd = [] {
  return le_to_long_double(CurveParams::prime_bytes());
}();

std::string label_index(std::string_view base, std::size_t i) {
  return std::string(base) + "[" + std::to_string(i + 1) + "]";
}

std::string label_index(std::string_view base, std::size_t i, std::size_t j) {
  return std::string(base) + "[" + std::to_string(i + 1) + "," +
         std::to_string(j + 1) + "]";
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

// --- Oracle -----------------------------------------------------------------

std::size_t OracleTranscript::answered() const {
  return static_cast<std::size_t>(
      std::count_if(queries.begin(), queries.end(),
                    [](const auto& q) { return q.response.has_value(); }));
}

OracleQuery oracle_query(const ProxyService& proxy, const KeyId& source_key_id,
                         const KeyId& factor_id, const CurvePoint& point,
                         RandomSource& rng) {
  ProcessResult r =
      proxy.process_message(adversarial_message(source_key_id, point, rng));
  return OracleQuery{point, response_for(r, factor_id)};
}

OracleTranscript oracle_adversary(const ProxyService& proxy,
                                  const KeyId& source_key_id,
                                  const KeyId& factor_id,
                                  std::size_t n_queries, RandomSource& rng) {
  OracleTranscript t;
  t.factor_id = factor_id;
  for (std::size_t i = 0; i < n_queries; ++i) {
    const CurvePoint x = base_mul(random_secret(rng));
    t.queries.push_back(oracle_query(proxy, source_key_id, factor_id, x, rng));
  }
  return t;
}

Scalar collusion_recover(const ClampedSecret& forwardee_secret,
                         const ProxyFactor& k) {
  return scalar_mul_mod(forwardee_secret.as_scalar(), k.value());
}

// --- Views ------------------------------------------------------------------

std::string_view view_role_name(ViewRole role) {
  switch (role) {
    case ViewRole::kProxy:
      return "proxy";
    case ViewRole::kForwardee:
      return "forwardee";
    case ViewRole::kEavesdropper:
      return "eavesdropper";
  }
  return "unknown";
}

std::vector<std::string> SimulatedView::shape() const {
  std::vector<std::string> out;
  for (const auto& e : elements) {
    const char* kind = std::holds_alternative<Scalar>(e.value)       ? "scalar"
                       : std::holds_alternative<CurvePoint>(e.value) ? "point"
                                                                     : "octets";
    out.push_back(e.label + ":" + kind);
  }
  return out;
}

const ViewElement& SimulatedView::at(std::string_view label) const {
  for (const auto& e : elements) {
    if (e.label == label) return e;
  }
  throw Error(ErrorCode::kNotFound, "no view element " + std::string(label));
}

ProtocolRun run_protocol(RandomSource& rng, std::size_t forwardees,
                         std::size_t queries_per_forwardee) {
  const KeyPair bob = generate_keypair(rng);
  ProxyService proxy;
  ProtocolRun run{bob.public_point(), {}, {}, {}};

  std::vector<KeyId> dest_ids;
  for (std::size_t i = 0; i < forwardees; ++i) {
    ForwardingGrant g = setup_forwarding(bob.secret, bob.fingerprint, rng);
    proxy.register_forwarding(make_forwarding_entry(bob.key_id, g));
    dest_ids.push_back(g.new_keypair.key_id);
    run.forwardees.push_back(
        ForwardeeRun{g.new_keypair.secret, g.proxy_factor, {}, {}, {}});
  }

  const Bytes message =
      encrypt_message(bob.public_key, random_octets(rng, 32), rng);
  const EncryptedMessage parsed = parse_message(message);
  run.ephemeral = parsed.pkesks[0].ephemeral;
  run.ciphertext = parsed.sealed_payload;

  ProcessResult delivered =
      proxy.process_message(armor(message, kArmorMessage));
  for (std::size_t i = 0; i < forwardees; ++i) {
    auto p_i = response_for(delivered, dest_ids[i]);
    if (!p_i) throw Error(ErrorCode::kNotFound, "forwardee got no message");
    run.forwardees[i].transformed = *p_i;
  }

  // Each forwardee mails Bob; every forwardee receives the transformed copy.
  for (std::size_t i = 0; i < forwardees; ++i) {
    for (std::size_t j = 0; j < queries_per_forwardee; ++j) {
      const CurvePoint x = base_mul(random_secret(rng));
      run.forwardees[i].queries.push_back(x);
      ProcessResult r =
          proxy.process_message(adversarial_message(bob.key_id, x, rng));
      for (std::size_t l = 0; l < forwardees; ++l) {
        auto resp = response_for(r, dest_ids[l]);
        if (!resp) throw Error(ErrorCode::kNotFound, "query not forwarded");
        run.forwardees[l].query_responses.push_back(*resp);
      }
    }
  }
  return run;
}

SimulatedView build_real_view(ViewRole role, const ProtocolRun& run,
                              std::size_t forwardee) {
  SimulatedView v;
  v.role = role;
  if (role == ViewRole::kProxy) {
    v.elements.push_back({"c", run.ciphertext});
    v.elements.push_back({"P_B", run.ephemeral});
    for (std::size_t i = 0; i < run.forwardees.size(); ++i) {
      v.elements.push_back({label_index("k", i), run.forwardees[i].factor.value()});
    }
    for (std::size_t i = 0; i < run.forwardees.size(); ++i) {
      const auto& q = run.forwardees[i].queries;
      for (std::size_t j = 0; j < q.size(); ++j) {
        v.elements.push_back({label_index("X", i, j), q[j]});
      }
    }
    return v;
  }

  const ForwardeeRun& f = run.forwardees.at(forwardee);
  for (std::size_t j = 0; j < f.queries.size(); ++j) {
    v.elements.push_back({label_index("X", j), f.queries[j]});
  }
  if (role == ViewRole::kEavesdropper) {
    v.elements.push_back({"d_A G", run.ephemeral});
    v.elements.push_back({"d_B G", run.bob_public});
  }
  v.elements.push_back({"c", run.ciphertext});
  v.elements.push_back({"d_i", f.secret.as_scalar()});
  v.elements.push_back({"P_i", f.transformed});
  for (std::size_t j = 0; j < f.query_responses.size(); ++j) {
    v.elements.push_back({label_index("kX", j), f.query_responses[j]});
  }
  return v;
}

SimulatedView build_sim_view(ViewRole role, const ProtocolRun& run,
                             RandomSource& rng, std::size_t forwardee) {
  SimulatedView v = build_real_view(role, run, forwardee);
  auto chi_point = [&] { return base_mul(random_secret(rng)); };

  switch (role) {
    case ViewRole::kForwardee:
      break;
    case ViewRole::kEavesdropper:
      for (auto& e : v.elements) {
        if (e.label == "d_A G" || e.label == "d_B G") e.value = chi_point();
      }
      break;
    case ViewRole::kProxy:
      for (auto& e : v.elements) {
        if (e.label == "P_B") {
          e.value = chi_point();
        } else if (e.label.rfind("k[", 0) == 0) {
          const ClampedSecret x = random_secret(rng);
          const ClampedSecret z = random_secret(rng);
          e.value = scalar_mul_mod(x.as_scalar(), scalar_invert(z.as_scalar()));
        } else if (e.label.rfind("X[", 0) == 0) {
          e.value = chi_point();
        }
      }
      break;
  }
  return v;
}

// --- Statistics -------------------------------------------------------------

double to_unit_interval(const ViewValue& value) {
  if (const auto* s = std::get_if<Scalar>(&value)) {
    return static_cast<double>(le_to_long_double(s->to_bytes()) / kOrderLd);
  }
  if (const auto* p = std::get_if<CurvePoint>(&value)) {
    return static_cast<double>(le_to_long_double(p->bytes()) / kPrimeLd);
  }
  const Bytes& b = std::get<Bytes>(value);
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | (i < b.size() ? b[i] : 0);
  return std::ldexp(static_cast<double>(v), -64);
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0) return 1.0;
  double q;
  if (lambda < 1.18) {
    // 1 - CDF via the Jacobi theta form, which converges fast for small x.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double sum = 0;
    for (int k = 1; k <= 20; ++k) {
      const double m = 2.0 * k - 1.0;
      sum += std::exp(-m * m * pi2 / (8.0 * lambda * lambda));
    }
    q = 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum;
  } else {
    double sum = 0;
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * lambda * lambda);
      sum += (k % 2 == 1 ? term : -term);
      if (term < 1e-300) break;
    }
    q = 2.0 * sum;
  }
  return std::clamp(q, 0.0, 1.0);
}

KsResult distinguisher_test(std::vector<double> real, std::vector<double> sim,
                            double alpha) {
  if (real.size() < kMinKsSamples || sim.size() < kMinKsSamples) {
    throw Error(ErrorCode::kInsufficientSamples,
                "KS test needs at least " + std::to_string(kMinKsSamples) +
                    " samples per side");
  }
  std::sort(real.begin(), real.end());
  std::sort(sim.begin(), sim.end());
  const double n = static_cast<double>(real.size());
  const double m = static_cast<double>(sim.size());

  double d = 0;
  std::size_t i = 0, j = 0;
  while (i < real.size() && j < sim.size()) {
    const double x = std::min(real[i], sim[j]);
    while (i < real.size() && real[i] == x) ++i;
    while (j < sim.size() && sim[j] == x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / n -
                              static_cast<double>(j) / m));
  }

  const double en = std::sqrt(n * m / (n + m));
  KsResult r;
  r.statistic = d;
  r.p_value = kolmogorov_sf((en + 0.12 + 0.11 / en) * d);
  r.pass = r.p_value > alpha;
  return r;
}

// --- Scenario runner ----------------------------------------------------------

std::string HarnessLine::to_string() const {
  return "scenario=" + scenario + " samples=" + std::to_string(samples) +
         " statistic=" + format_double(statistic) + " p_value=" +
         (std::isnan(p_value) ? std::string("-") : format_double(p_value)) +
         " verdict=" + (pass ? "pass" : "fail");
}

std::vector<HarnessLine> run_harness(std::size_t samples, std::uint64_t seed,
                                     double alpha) {
  SeededRandom rng(seed);
  std::vector<HarnessLine> lines;

  {
    std::size_t mismatches = 0;
    const std::size_t trials = std::max<std::size_t>(samples / 10, 1000);
    for (std::size_t t = 0; t < trials; ++t) {
      const KeyPair bob = generate_keypair(rng);
      const ForwardingGrant g =
          setup_forwarding(bob.secret, bob.fingerprint, rng);
      if (collusion_recover(g.new_keypair.secret, g.proxy_factor) !=
          bob.secret.as_scalar()) {
        ++mismatches;
      }
    }
    lines.push_back({"collusion-identity", trials,
                     static_cast<double>(mismatches), std::nan(""),
                     mismatches == 0});
  }

  // Families keyed by label, in first-seen order.
  struct Families {
    std::vector<std::string> order;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>>
        values;
    void add(const SimulatedView& real, const SimulatedView& sim) {
      for (std::size_t e = 0; e < real.elements.size(); ++e) {
        const auto& label = real.elements[e].label;
        auto [it, inserted] = values.try_emplace(label);
        if (inserted) order.push_back(label);
        it->second.first.push_back(to_unit_interval(real.elements[e].value));
        it->second.second.push_back(to_unit_interval(sim.elements[e].value));
      }
    }
  };
  std::map<ViewRole, Families> families;
  std::vector<double> uniform, responses, eav_qb, eav_pb, eav_pi, eav_kx;

  for (std::size_t s = 0; s < samples; ++s) {
    const ProtocolRun run = run_protocol(rng, 2, 1);
    for (ViewRole role :
         {ViewRole::kProxy, ViewRole::kForwardee, ViewRole::kEavesdropper}) {
      families[role].add(build_real_view(role, run),
                         build_sim_view(role, run, rng));
    }
    // Uniform reference: r G with r uniform in F_n.
    ScalarBytes r{};
    rng.fill(r);
    Scalar rs = Scalar::from_bytes(r);
    if (rs.is_zero()) rs = Scalar::from_u64(1);
    uniform.push_back(to_unit_interval(scalar_mul(rs, CurvePoint::base_point())));

    responses.push_back(to_unit_interval(run.forwardees[0].query_responses[0]));
    eav_qb.push_back(to_unit_interval(run.bob_public));
    eav_pb.push_back(to_unit_interval(run.ephemeral));
    eav_pi.push_back(to_unit_interval(run.forwardees[0].transformed));
    eav_kx.push_back(to_unit_interval(run.forwardees[0].query_responses[1]));
  }

  auto ks_line = [&](const std::string& name, const std::vector<double>& a,
                     const std::vector<double>& b) {
    KsResult r = distinguisher_test(a, b, alpha);
    lines.push_back({name, a.size(), r.statistic, r.p_value, r.pass});
  };

  ks_line("oracle-responses-vs-uniform", responses, uniform);
  for (ViewRole role :
       {ViewRole::kProxy, ViewRole::kForwardee, ViewRole::kEavesdropper}) {
    const Families& f = families[role];
    for (const auto& label : f.order) {
      const auto& [real, sim] = f.values.at(label);
      ks_line(std::string(view_role_name(role)) + "/" + label, real, sim);
    }
  }
  ks_line("eavesdropper-uniform/Q_B", eav_qb, uniform);
  ks_line("eavesdropper-uniform/P_B", eav_pb, uniform);
  ks_line("eavesdropper-uniform/P_i", eav_pi, uniform);
  ks_line("eavesdropper-uniform/kX", eav_kx, uniform);
  return lines;
}

}  // namespace pgpfwd
