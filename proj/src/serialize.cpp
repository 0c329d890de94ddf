#include "ttr/serialize.hpp"

#include <cmath>

namespace ttr {

nlohmann::json matrix_to_json(const CMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const nlohmann::json& j, const std::string& field) {
  auto fail = [&](const std::string& msg) { throw SchemaError("field \"" + field + "\": " + msg); };
  if (!j.is_array() || j.empty()) fail("expected a non-empty array of rows");
  const std::size_t nrows = j.size();
  std::size_t ncols = 0;
  for (std::size_t r = 0; r < nrows; ++r) {
    const auto& row = j[r];
    if (!row.is_array()) fail("row " + std::to_string(r) + " is not an array");
    if (r == 0) ncols = row.size();
    if (row.size() != ncols || ncols == 0)
      fail("row " + std::to_string(r) + " has " + std::to_string(row.size()) +
           " entries, expected " + std::to_string(ncols));
  }
  CMatrix m(static_cast<Index>(nrows), static_cast<Index>(ncols));
  for (std::size_t r = 0; r < nrows; ++r) {
    for (std::size_t c = 0; c < ncols; ++c) {
      const auto& e = j[r][c];
      std::string where = "entry [" + std::to_string(r) + "][" + std::to_string(c) + "]";
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        fail(where + " must be a [re, im] pair of numbers");
      double re = e[0].get<double>();
      double im = e[1].get<double>();
      if (!std::isfinite(re) || !std::isfinite(im)) fail(where + " is not finite");
      m(static_cast<Index>(r), static_cast<Index>(c)) = Complex(re, im);
    }
  }
  return m;
}

}  // namespace ttr
