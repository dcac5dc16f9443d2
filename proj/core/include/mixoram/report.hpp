#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace mixoram {

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Per-trial CSV rows plus an ordered key=value summary and pass/fail verdicts.
class ExperimentReport {
 public:
  explicit ExperimentReport(std::string experiment = {}) : experiment_(std::move(experiment)) {}

  const std::string& experiment() const { return experiment_; }
  void set_stem(std::string stem) { stem_ = std::move(stem); }
  const std::string& stem() const { return stem_; }

  void set_columns(std::vector<std::string> columns) { columns_ = std::move(columns); }
  void add_row(std::vector<std::string> row);
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, std::uint64_t value);
  std::string get(const std::string& key) const;
  void verdict(std::string name, bool pass, std::string detail = {});
  // Appends another report's summary and verdicts under a prefix.
  void merge(const ExperimentReport& other, const std::string& prefix);

  bool passed() const;
  const std::vector<Verdict>& verdicts() const { return verdicts_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  std::string csv() const;
  std::string summary() const;
  // Writes <stem>.csv and <stem>.summary into dir; returns the csv path.
  std::filesystem::path write(const std::filesystem::path& dir) const;

 private:
  std::string experiment_;
  std::string stem_ = "report";
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::pair<std::string, std::string>> summary_;
  std::vector<Verdict> verdicts_;
};

// Shortest round-trippable decimal form.
std::string format_double(double v);

}  // namespace mixoram
