#include "ttr/specfile.hpp"

#include <set>

namespace ttr {

namespace {

int line_of(const std::string& text, const std::string& key) {
  auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 1;
  int line = 1;
  for (std::size_t i = 0; i < pos; ++i)
    if (text[i] == '\n') ++line;
  return line;
}

[[noreturn]] void fail_at(const std::string& text, const std::string& key, const std::string& msg) {
  throw SchemaError("line " + std::to_string(line_of(text, key)) + ": " + msg);
}

const std::set<std::string> kKnownKeys = {"name", "dim_s", "dim_e", "unitary", "hamiltonian",
                                          "H_S", "H_E", "H_I", "g", "Gamma", "xi", "gamma",
                                          "xi_prime", "policy"};

}  // namespace

CMatrix SpecFile::total_hamiltonian() const {
  if (h_tot) return h_tot->mat();
  if (has_split())
    return kron(h_s->mat(), identity(dim_e)) + kron(identity(dim_s), h_e->mat()) + h_i->mat();
  throw DomainError("spec has no Hamiltonian");
}

Dilation SpecFile::dilation(std::optional<double> dt) const {
  if (unitary) return Dilation(dim_s, dim_e, *unitary, xi);
  if (!dt) throw DomainError("a Hamiltonian spec needs an evolution time (--dt)");
  return hamiltonian_dilation().dilation(*dt);
}

HamiltonianDilation SpecFile::hamiltonian_dilation() const {
  if (!has_hamiltonian()) throw DomainError("spec has no Hamiltonian");
  HamiltonianDilation hd{dim_s, dim_e, HermMatrix::symmetrize(total_hamiltonian()), xi, g.value_or(1.0)};
  hd.validate();
  return hd;
}

CollisionSpec SpecFile::collision_spec() const {
  if (!has_split()) throw DomainError("collision runs need H_S, H_E and H_I");
  if (!gamma_rate) throw DomainError("collision runs need the collision rate Gamma");
  CollisionSpec cs{*h_s, *h_e, *h_i, xi, g.value_or(1.0), *gamma_rate};
  cs.validate();
  return cs;
}

NumericPolicy apply_policy_overrides(NumericPolicy base, const nlohmann::json& overrides) {
  if (overrides.is_null()) return base;
  if (!overrides.is_object()) throw SchemaError("policy must be an object");
  for (auto it = overrides.begin(); it != overrides.end(); ++it) {
    if (!it.value().is_number()) throw SchemaError("policy field \"" + it.key() + "\" must be a number");
    double v = it.value().get<double>();
    if (it.key() == "rank_tol") base.rank_tol = v;
    else if (it.key() == "cptp_tol") base.cptp_tol = v;
    else if (it.key() == "equality_tol") base.equality_tol = v;
    else if (it.key() == "degeneracy_gap") base.degeneracy_gap = v;
    else throw SchemaError("unknown policy field \"" + it.key() + "\"");
  }
  try {
    base.validate();
  } catch (const DomainError& e) {
    throw SchemaError(e.what());
  }
  return base;
}

nlohmann::json policy_to_json(const NumericPolicy& pol) {
  return {{"rank_tol", pol.rank_tol},
          {"cptp_tol", pol.cptp_tol},
          {"equality_tol", pol.equality_tol},
          {"degeneracy_gap", pol.degeneracy_gap}};
}

SpecFile parse_spec(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("line 1: spec must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!kKnownKeys.count(it.key())) fail_at(text, it.key(), "unknown field \"" + it.key() + "\"");

  SpecFile s;
  auto count = [&](const char* key) -> Index {
    if (!doc.contains(key)) fail_at(text, key, std::string("missing field \"") + key + "\"");
    const auto& v = doc[key];
    if (!v.is_number_integer() || v.get<long long>() < 1)
      fail_at(text, key, std::string("field \"") + key + "\" must be a positive integer");
    return static_cast<Index>(v.get<long long>());
  };
  auto matrix = [&](const char* key, Index dim) -> CMatrix {
    CMatrix m;
    try {
      m = matrix_from_json(doc[key], key);
    } catch (const SchemaError& e) {
      fail_at(text, key, e.what());
    }
    if (m.rows() != dim || m.cols() != dim)
      fail_at(text, key, std::string("field \"") + key + "\" must be " + std::to_string(dim) + "x" +
                             std::to_string(dim));
    return m;
  };
  auto herm = [&](const char* key, Index dim) -> HermMatrix {
    CMatrix m = matrix(key, dim);
    try {
      return HermMatrix(m, 1e-10);
    } catch (const DomainError& e) {
      fail_at(text, key, std::string("field \"") + key + "\": " + e.what());
    }
  };
  auto density = [&](const char* key, Index dim) -> HermMatrix {
    HermMatrix h = herm(key, dim);
    try {
      require_density(h, key, 1e-8);
    } catch (const DomainError& e) {
      fail_at(text, key, e.what());
    }
    return h;
  };
  auto number = [&](const char* key) -> std::optional<double> {
    if (!doc.contains(key)) return std::nullopt;
    if (!doc[key].is_number()) fail_at(text, key, std::string("field \"") + key + "\" must be a number");
    return doc[key].get<double>();
  };

  if (doc.contains("name")) {
    if (!doc["name"].is_string()) fail_at(text, "name", "field \"name\" must be a string");
    s.name = doc["name"].get<std::string>();
  }
  s.dim_s = count("dim_s");
  s.dim_e = count("dim_e");
  const Index dt = s.dim_s * s.dim_e;
  if (doc.contains("unitary")) {
    if (doc.contains("hamiltonian") || doc.contains("H_I"))
      fail_at(text, "unitary", "give either \"unitary\" or a Hamiltonian, not both");
    s.unitary = matrix("unitary", dt);
    if (unitarity_defect(*s.unitary) > 1e-10) fail_at(text, "unitary", "field \"unitary\" is not unitary");
  }
  if (doc.contains("hamiltonian")) s.h_tot = herm("hamiltonian", dt);
  bool any_split = doc.contains("H_S") || doc.contains("H_E") || doc.contains("H_I");
  if (any_split) {
    for (const char* k : {"H_S", "H_E", "H_I"})
      if (!doc.contains(k)) fail_at(text, k, std::string("Hamiltonian split is missing \"") + k + "\"");
    s.h_s = herm("H_S", s.dim_s);
    s.h_e = herm("H_E", s.dim_e);
    s.h_i = herm("H_I", dt);
    if (s.h_tot) {
      CMatrix sum = kron(s.h_s->mat(), identity(s.dim_e)) + kron(identity(s.dim_s), s.h_e->mat()) + s.h_i->mat();
      if ((sum - s.h_tot->mat()).norm() > 1e-9)
        fail_at(text, "hamiltonian", "\"hamiltonian\" disagrees with H_S + H_E + H_I");
    }
  }
  if (!s.unitary && !s.h_tot && !any_split)
    fail_at(text, "dim_s", "spec needs \"unitary\" or a Hamiltonian");
  s.g = number("g");
  s.gamma_rate = number("Gamma");
  if (s.gamma_rate && *s.gamma_rate < 0) fail_at(text, "Gamma", "field \"Gamma\" must be non-negative");
  if (!doc.contains("xi")) fail_at(text, "xi", "missing field \"xi\"");
  if (!doc.contains("gamma")) fail_at(text, "gamma", "missing field \"gamma\"");
  s.xi = density("xi", s.dim_e);
  s.gamma = density("gamma", s.dim_s);
  if (doc.contains("xi_prime")) s.xi_prime = density("xi_prime", s.dim_e);
  if (doc.contains("policy")) {
    try {
      apply_policy_overrides(NumericPolicy{}, doc["policy"]);
    } catch (const SchemaError& e) {
      fail_at(text, "policy", e.what());
    }
    s.policy_overrides = doc["policy"];
  }
  return s;
}

nlohmann::json spec_to_json(const SpecFile& s) {
  nlohmann::json j;
  if (!s.name.empty()) j["name"] = s.name;
  j["dim_s"] = s.dim_s;
  j["dim_e"] = s.dim_e;
  if (s.unitary) j["unitary"] = matrix_to_json(*s.unitary);
  if (s.h_tot) j["hamiltonian"] = matrix_to_json(s.h_tot->mat());
  if (s.h_s) j["H_S"] = matrix_to_json(s.h_s->mat());
  if (s.h_e) j["H_E"] = matrix_to_json(s.h_e->mat());
  if (s.h_i) j["H_I"] = matrix_to_json(s.h_i->mat());
  if (s.g) j["g"] = *s.g;
  if (s.gamma_rate) j["Gamma"] = *s.gamma_rate;
  j["xi"] = matrix_to_json(s.xi.mat());
  j["gamma"] = matrix_to_json(s.gamma.mat());
  if (s.xi_prime) j["xi_prime"] = matrix_to_json(s.xi_prime->mat());
  if (!s.policy_overrides.empty()) j["policy"] = s.policy_overrides;
  return j;
}

}  // namespace ttr
