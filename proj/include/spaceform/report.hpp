#pragma once

// Check records and their serialization: one JSON object per line for
// reports, CSV for convergence tables.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace spaceform {

struct CheckRecord {
  std::string name;
  std::vector<std::pair<std::string, double>> inputs;
  std::vector<std::pair<std::string, std::string>> labels;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  CheckRecord& input(std::string key, double value) {
    inputs.emplace_back(std::move(key), value);
    return *this;
  }
  CheckRecord& label(std::string key, std::string value) {
    labels.emplace_back(std::move(key), std::move(value));
    return *this;
  }
};

/// residual < tolerance, with NaN counted as failure.
inline CheckRecord make_check(std::string name, double lhs, double rhs, double residual, double tolerance) {
  CheckRecord r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.residual = residual;
  r.tolerance = tolerance;
  r.pass = std::isfinite(residual) && residual < tolerance;
  return r;
}

/// Passes when value > threshold.
inline CheckRecord make_lower_bound_check(std::string name, double value, double threshold) {
  CheckRecord r = make_check(std::move(name), value, threshold, value - threshold, 0.0);
  r.pass = std::isfinite(value) && value > threshold;
  return r;
}

class VerificationReport {
 public:
  void add(CheckRecord r) { records_.push_back(std::move(r)); }
  void append(const VerificationReport& other) {
    records_.insert(records_.end(), other.records_.begin(), other.records_.end());
  }

  const std::vector<CheckRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }
  std::size_t size() const { return records_.size(); }

  bool all_pass() const {
    for (const auto& r : records_)
      if (!r.pass) return false;
    return !records_.empty();
  }

  double max_residual() const {
    double m = 0.0;
    for (const auto& r : records_) m = std::max(m, r.residual);
    return m;
  }

 private:
  std::vector<CheckRecord> records_;
};

/// JSON numbers cannot be NaN or infinite; those become strings.
inline nlohmann::ordered_json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline nlohmann::ordered_json to_json(const CheckRecord& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  nlohmann::ordered_json in = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.labels) in[k] = v;
  for (const auto& [k, v] : r.inputs) in[k] = json_number(v);
  j["inputs"] = in;
  j["lhs"] = json_number(r.lhs);
  j["rhs"] = json_number(r.rhs);
  j["residual"] = json_number(r.residual);
  j["tolerance"] = json_number(r.tolerance);
  j["pass"] = r.pass;
  return j;
}

inline void write_json_lines(std::ostream& os, const VerificationReport& report) {
  for (const auto& r : report.records()) os << to_json(r).dump() << '\n';
}

/// Minimal CSV table with fixed column order.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<double> row) { rows_.push_back(std::move(row)); }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  const std::vector<std::string>& columns() const { return columns_; }

  void write(std::ostream& os) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
    os << '\n';
    char buf[32];
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", row[i]);
        os << (i ? "," : "") << buf;
      }
      os << '\n';
    }
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace spaceform
