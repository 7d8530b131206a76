#pragma once

#include <string>

#include <Eigen/Dense>

#include "json.hpp"

namespace stabkit {

/// JSON array of rows of finite numbers. Throws SchemaError otherwise.
Eigen::MatrixXd MatrixFromJson(const nlohmann::json& rows);
nlohmann::json MatrixToJson(const Eigen::MatrixXd& M);

/// Reads a file holding a matrix document, either a bare array of rows or an
/// object with a single "rows" member.
Eigen::MatrixXd LoadMatrixFile(const std::string& path);

nlohmann::json LoadJsonFile(const std::string& path);

}  // namespace stabkit
