#include "stabkit/matrix_io.h"

#include <cmath>
#include <fstream>

#include "stabkit/errors.h"

namespace stabkit {

Eigen::MatrixXd MatrixFromJson(const nlohmann::json& rows) {
  if (!rows.is_array() || rows.empty()) {
    throw SchemaError("matrix must be a non-empty array of rows");
  }
  const size_t m = rows.size();
  if (!rows[0].is_array() || rows[0].empty()) {
    throw SchemaError("matrix row 0 must be a non-empty array");
  }
  const size_t n = rows[0].size();
  Eigen::MatrixXd M(m, n);
  for (size_t i = 0; i < m; ++i) {
    if (!rows[i].is_array() || rows[i].size() != n) {
      throw SchemaError("matrix row " + std::to_string(i) +
                        " has the wrong length");
    }
    for (size_t j = 0; j < n; ++j) {
      const auto& x = rows[i][j];
      if (!x.is_number() || !std::isfinite(x.get<double>())) {
        throw SchemaError("matrix entry (" + std::to_string(i) + "," +
                          std::to_string(j) + ") is not a finite number");
      }
      M(i, j) = x.get<double>();
    }
  }
  return M;
}

nlohmann::json MatrixToJson(const Eigen::MatrixXd& M) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json LoadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

Eigen::MatrixXd LoadMatrixFile(const std::string& path) {
  const nlohmann::json doc = LoadJsonFile(path);
  if (doc.is_object()) {
    if (doc.size() != 1 || !doc.contains("rows")) {
      throw SchemaError(path + ": expected {\"rows\": [...]}");
    }
    return MatrixFromJson(doc.at("rows"));
  }
  return MatrixFromJson(doc);
}

}  // namespace stabkit
