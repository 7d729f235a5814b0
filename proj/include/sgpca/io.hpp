#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sgpca/error.hpp"
#include "sgpca/tuning.hpp"
#include "sgpca/types.hpp"

namespace sgpca {

inline constexpr const char* kVersion = "0.1.0";

// All floats are serialized with 17 significant digits so doubles round-trip
// bit-exactly through the CSV files.
inline std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace detail {

inline std::optional<double> parse_double(const std::string& field) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin) return std::nullopt;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  if (*end != '\0') return std::nullopt;
  return value;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

inline std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

}  // namespace detail

// Rectangular numeric CSV (UTF-8, comma separator, '.' decimal point, LF).
// Errors carry the offending row/column location.
inline DataMatrix read_matrix(const std::string& path, bool has_header = false) {
  std::ifstream file(path);
  if (!file) fail(ErrorCode::IoError, "read_matrix: cannot open '" + path + "'");
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_number = 0;
  while (std::getline(file, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (has_header && names.empty() && rows.empty()) {
      for (const auto& field : fields) names.push_back(detail::trim(field));
      continue;
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto value = detail::parse_double(fields[c]);
      if (!value)
        fail(ErrorCode::DataError, "read_matrix: '" + path + "' line " +
                                       std::to_string(line_number) + " column " +
                                       std::to_string(c + 1) + ": non-numeric cell '" +
                                       detail::trim(fields[c]) + "'");
      row.push_back(*value);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(ErrorCode::DataError, "read_matrix: '" + path + "' line " +
                                     std::to_string(line_number) + ": ragged row (" +
                                     std::to_string(row.size()) + " fields, expected " +
                                     std::to_string(rows.front().size()) + ")");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::DataError, "read_matrix: '" + path + "' has no data rows");
  Matrix values(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < rows[i].size(); ++c)
      values(static_cast<int>(i), static_cast<int>(c)) = rows[i][c];
  if (!names.empty() && names.size() != static_cast<std::size_t>(values.cols()))
    fail(ErrorCode::DataError, "read_matrix: '" + path + "': header width does not match rows");
  return DataMatrix(std::move(values), std::move(names));
}

// Group assignment file: either a two-column CSV "column_index,group_id"
// (optionally with a header) or a JSON object mapping column index to group
// id. Groups are ordered by first appearance over ascending column index.
inline GroupPartition read_groups(const std::string& path) {
  std::ifstream file(path);
  if (!file) fail(ErrorCode::IoError, "read_groups: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << file.rdbuf();
  const std::string content = buffer.str();

  std::map<int, std::string> assignment;  // column -> group id
  const auto first_char = content.find_first_not_of(" \t\r\n");
  if (first_char != std::string::npos && content[first_char] == '{') {
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(content);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::DataError, "read_groups: '" + path + "': invalid JSON: " + e.what());
    }
    for (const auto& [key, value] : parsed.items()) {
      int column = -1;
      try {
        column = std::stoi(key);
      } catch (...) {
        fail(ErrorCode::DataError, "read_groups: '" + path + "': non-integer column '" + key + "'");
      }
      if (assignment.count(column))
        fail(ErrorCode::DataError, "read_groups: '" + path + "': duplicate-assignment for column " +
                                       std::to_string(column));
      assignment[column] =
          value.is_string() ? value.get<std::string>() : value.dump();
    }
  } else {
    std::stringstream stream(content);
    std::string line;
    int line_number = 0;
    while (std::getline(stream, line)) {
      ++line_number;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto fields = detail::split_csv_line(line);
      if (fields.size() != 2)
        fail(ErrorCode::DataError, "read_groups: '" + path + "' line " +
                                       std::to_string(line_number) + ": expected 2 fields");
      const std::string index_field = detail::trim(fields[0]);
      const std::string group_field = detail::trim(fields[1]);
      if (line_number == 1 && !detail::parse_double(index_field)) continue;  // header
      int column = -1;
      try {
        column = std::stoi(index_field);
      } catch (...) {
        fail(ErrorCode::DataError, "read_groups: '" + path + "' line " +
                                       std::to_string(line_number) + ": non-integer column '" +
                                       index_field + "'");
      }
      if (column < 0)
        fail(ErrorCode::DataError, "read_groups: '" + path + "' line " +
                                       std::to_string(line_number) + ": column index " +
                                       std::to_string(column) + " out of range");
      if (assignment.count(column))
        fail(ErrorCode::DataError, "read_groups: '" + path + "': duplicate-assignment for column " +
                                       std::to_string(column));
      assignment[column] = group_field;
    }
  }
  if (assignment.empty()) fail(ErrorCode::DataError, "read_groups: '" + path + "' is empty");
  const int p = assignment.rbegin()->first + 1;
  for (int c = 0; c < p; ++c)
    if (!assignment.count(c))
      fail(ErrorCode::DataError,
           "read_groups: '" + path + "': coverage-gap at column " + std::to_string(c));

  std::vector<std::string> names;
  std::vector<std::vector<int>> groups;
  std::map<std::string, std::size_t> index_of;
  for (int c = 0; c < p; ++c) {
    const std::string& id = assignment[c];
    auto found = index_of.find(id);
    if (found == index_of.end()) {
      found = index_of.emplace(id, groups.size()).first;
      groups.emplace_back();
      names.push_back(id);
    }
    groups[found->second].push_back(c);
  }
  return GroupPartition(std::move(groups), std::move(names));
}

inline void write_groups(const GroupPartition& partition, const std::string& path) {
  std::ofstream file(path);
  if (!file) fail(ErrorCode::IoError, "write_groups: cannot write '" + path + "'");
  file << "column,group\n";
  for (int c = 0; c < partition.dim(); ++c)
    file << c << "," << partition.name(partition.group_of(c)) << "\n";
}

// Provenance record written alongside every output directory; re-running the
// recorded command with the same inputs reproduces the outputs bit-exactly
// (wall_time_sec is the one informational field excluded from that contract).
struct RunManifest {
  std::string command;
  nlohmann::json parameters = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::map<std::string, std::string> input_digests;
  double wall_time_sec = 0.0;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["parameters"] = parameters;
    j["seed"] = seed;
    j["inputs"] = input_digests;
    j["version"] = kVersion;
    j["wall_time_sec"] = wall_time_sec;
    return j;
  }
};

// FNV-1a 64-bit content digest, hex-encoded, prefixed with the scheme name.
inline std::string file_digest(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) fail(ErrorCode::IoError, "file_digest: cannot open '" + path + "'");
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char chunk[4096];
  while (file.read(chunk, sizeof(chunk)) || file.gcount() > 0) {
    for (std::streamsize i = 0; i < file.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(chunk[i]);
      hash *= 0x100000001b3ULL;
    }
    if (!file) break;
  }
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "fnv1a64:%016llx",
                static_cast<unsigned long long>(hash));
  return buffer;
}

inline void write_manifest(const RunManifest& manifest, const std::string& path) {
  std::ofstream file(path);
  if (!file) fail(ErrorCode::IoError, "write_manifest: cannot write '" + path + "'");
  file << manifest.to_json().dump(2) << "\n";
}

// Output bundle: loadings.csv (p x J), scores.csv (n x J projections X v),
// support.csv (component, group, column, value), alignment_report.csv when
// reports exist, and manifest.json.
inline std::vector<std::string> write_results(const std::vector<PCEstimate>& estimates,
                                              const std::vector<AlignmentReport>& reports,
                                              RunManifest manifest, const std::string& outdir,
                                              const GroupPartition& partition,
                                              const Matrix* scores_input = nullptr) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (!fs::is_directory(outdir))
    fail(ErrorCode::IoError, "write_results: cannot create directory '" + outdir + "'");
  if (estimates.empty()) fail(ErrorCode::DataError, "write_results: no estimates");
  std::vector<std::string> written;
  const int J = static_cast<int>(estimates.size());
  const int p = static_cast<int>(estimates.front().loading.size());

  auto open = [&](const std::string& name) {
    const std::string path = (fs::path(outdir) / name).string();
    std::ofstream file(path);
    if (!file) fail(ErrorCode::IoError, "write_results: cannot write '" + path + "'");
    written.push_back(path);
    return file;
  };

  {
    auto file = open("loadings.csv");
    for (int j = 0; j < J; ++j) file << (j ? "," : "") << "pc" << (j + 1);
    file << "\n";
    for (int c = 0; c < p; ++c) {
      for (int j = 0; j < J; ++j)
        file << (j ? "," : "") << format_double(estimates[static_cast<std::size_t>(j)].loading[c]);
      file << "\n";
    }
  }
  if (scores_input != nullptr) {
    auto file = open("scores.csv");
    for (int j = 0; j < J; ++j) file << (j ? "," : "") << "pc" << (j + 1);
    file << "\n";
    for (int i = 0; i < scores_input->rows(); ++i) {
      for (int j = 0; j < J; ++j) {
        const double score =
            scores_input->row(i).dot(estimates[static_cast<std::size_t>(j)].loading);
        file << (j ? "," : "") << format_double(score);
      }
      file << "\n";
    }
  }
  {
    auto file = open("support.csv");
    file << "component,group,column,value\n";
    for (int j = 0; j < J; ++j) {
      const auto& estimate = estimates[static_cast<std::size_t>(j)];
      for (int c : estimate.support)
        file << (j + 1) << "," << partition.name(partition.group_of(c)) << "," << c << ","
             << format_double(estimate.loading[c]) << "\n";
    }
  }
  if (!reports.empty()) {
    auto file = open("alignment_report.csv");
    file << "component,eta,tau,align,mean_support,failures\n";
    for (const auto& report : reports)
      for (const auto& cell : report.cells)
        file << report.component << "," << format_double(cell.eta) << ","
             << format_double(cell.tau) << "," << format_double(cell.align) << ","
             << format_double(cell.mean_support) << "," << cell.failures << "\n";
  } else {
    manifest.parameters["tuning"] = "untuned";
  }
  write_manifest(manifest, (fs::path(outdir) / "manifest.json").string());
  written.push_back((fs::path(outdir) / "manifest.json").string());
  return written;
}

}  // namespace sgpca
