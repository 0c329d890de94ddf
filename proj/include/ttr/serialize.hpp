#pragma once

#include <string>

#include <json.hpp>

#include "ttr/matrixkit.hpp"

namespace ttr {

// Input that does not match the expected document structure.
class SchemaError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Matrices travel as row-major nested arrays of [re, im] pairs.
nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j, const std::string& field);

}  // namespace ttr
