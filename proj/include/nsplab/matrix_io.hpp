#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace nsplab {

// CSV layout: a `# shape,<rows>,<cols>` comment line followed by one
// comma-separated row per line, values printed with 17 significant digits.
// Reading also accepts files without the shape line.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(std::istream& in);
Eigen::MatrixXd read_matrix_csv_file(const std::string& path);
void write_matrix_csv_file(const std::string& path, const Eigen::MatrixXd& m);

// {"rows": r, "cols": c, "data": [[...], ...]}
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

nlohmann::json vector_to_json(const Eigen::VectorXd& v);

// "%.17g"
std::string format_double(double v);

}  // namespace nsplab
