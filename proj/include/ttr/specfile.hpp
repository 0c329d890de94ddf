#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "ttr/approx.hpp"
#include "ttr/collision.hpp"
#include "ttr/serialize.hpp"

namespace ttr {

// Input document for the command-line tool. Carries either a unitary or a
// Hamiltonian (total, or split into H_S, H_E, H_I), never both.
struct SpecFile {
  std::string name;
  Index dim_s = 0;
  Index dim_e = 0;
  std::optional<CMatrix> unitary;
  std::optional<HermMatrix> h_tot;
  std::optional<HermMatrix> h_s;
  std::optional<HermMatrix> h_e;
  std::optional<HermMatrix> h_i;
  std::optional<double> g;
  std::optional<double> gamma_rate;
  HermMatrix xi;
  HermMatrix gamma;
  std::optional<HermMatrix> xi_prime;
  nlohmann::json policy_overrides = nlohmann::json::object();

  bool has_hamiltonian() const { return h_tot.has_value() || h_i.has_value(); }
  bool has_split() const { return h_s && h_e && h_i; }
  CMatrix total_hamiltonian() const;
  // Unitary given directly, or exp(-i g H dt) when dt is supplied.
  Dilation dilation(std::optional<double> dt) const;
  HamiltonianDilation hamiltonian_dilation() const;
  CollisionSpec collision_spec() const;
};

// Reads and validates a spec document. Errors carry the line of the
// offending field: "line N: field \"xi\": ...".
SpecFile parse_spec(const std::string& text);
nlohmann::json spec_to_json(const SpecFile& spec);

// Applies policy overrides from a JSON object onto base.
NumericPolicy apply_policy_overrides(NumericPolicy base, const nlohmann::json& overrides);
nlohmann::json policy_to_json(const NumericPolicy& pol);

}  // namespace ttr
