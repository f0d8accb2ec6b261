#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include <json.hpp>

namespace heatctrl {

inline constexpr const char* kToolkitVersion = "1.0.0";

// Significant-digit contracts for reproducible output.
inline constexpr int kCsvDigits = 9;
inline constexpr int kGammaDigits = 12;
inline constexpr int kMatrixDigits = 15;

// Shortest text form of x carrying `digits` significant digits (%.Ng).
std::string format_sig(double x, int digits);

// x rounded to `digits` significant digits (format + parse).  JSON numbers
// pass through this so the serializer's shortest-round-trip printing is
// byte-stable and carries exactly the intended precision.
double round_sig(double x, int digits);

// Row-major nested-array JSON value of a matrix, entries rounded to
// kMatrixDigits.
nlohmann::ordered_json matrix_json(const Eigen::MatrixXd& m);
nlohmann::ordered_json vector_json(const Eigen::VectorXd& v);

// Comma-separated table with a header row, LF line endings, and kCsvDigits
// significant digits per value.  Throws std::runtime_error when the path
// cannot be written.
void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Writes pretty-printed UTF-8 JSON with a trailing newline.
void write_json(const std::string& path, const nlohmann::ordered_json& j);

// Record of one CLI invocation: command, fully resolved parameters, and the
// produced files.  Replaying the manifest reproduces the outputs.
struct RunManifest {
  std::string command;
  nlohmann::ordered_json parameters;
  std::string version = kToolkitVersion;
  double duration_seconds = 0.0;
  std::vector<std::string> outputs;
};

void write_manifest(const std::string& path, const RunManifest& manifest);
RunManifest read_manifest(const std::string& path);

}  // namespace heatctrl
