#include "heatctrl/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace heatctrl {

using nlohmann::ordered_json;

std::string format_sig(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
  return buf;
}

double round_sig(double x, int digits) {
  return std::strtod(format_sig(x, digits).c_str(), nullptr);
}

ordered_json matrix_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(round_sig(m(i, j), kMatrixDigits));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json vector_json(const Eigen::VectorXd& v) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    arr.push_back(round_sig(v(i), kMatrixDigits));
  }
  return arr;
}

void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (size_t i = 0; i < header.size(); ++i) {
    if (i > 0) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << format_sig(row[i], kCsvDigits);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_json(const std::string& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  ordered_json j;
  j["command"] = manifest.command;
  j["parameters"] = manifest.parameters;
  j["version"] = manifest.version;
  j["duration_seconds"] = round_sig(manifest.duration_seconds, 3);
  j["outputs"] = manifest.outputs;
  write_json(path, j);
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read manifest: " + path);
  ordered_json j;
  RunManifest m;
  try {
    in >> j;
    m.command = j.at("command").get<std::string>();
    m.parameters = j.at("parameters");
    m.version = j.value("version", std::string(kToolkitVersion));
    m.duration_seconds = j.value("duration_seconds", 0.0);
    if (j.contains("outputs")) {
      m.outputs = j.at("outputs").get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed manifest " + path + ": " + e.what());
  }
  return m;
}

}  // namespace heatctrl
