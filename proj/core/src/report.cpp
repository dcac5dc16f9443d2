#include "mixoram/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "mixoram/error.hpp"

namespace mixoram {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void ExperimentReport::add_row(std::vector<std::string> row) {
  if (!columns_.empty() && row.size() != columns_.size()) {
    fail(Errc::kInvalidArgument, "row width does not match the header");
  }
  rows_.push_back(std::move(row));
}

void ExperimentReport::set(const std::string& key, const std::string& value) {
  for (auto& kv : summary_) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  summary_.emplace_back(key, value);
}

void ExperimentReport::set(const std::string& key, double value) { set(key, format_double(value)); }

void ExperimentReport::set(const std::string& key, std::uint64_t value) {
  set(key, std::to_string(value));
}

std::string ExperimentReport::get(const std::string& key) const {
  for (const auto& kv : summary_) {
    if (kv.first == key) return kv.second;
  }
  return {};
}

void ExperimentReport::verdict(std::string name, bool pass, std::string detail) {
  verdicts_.push_back({std::move(name), pass, std::move(detail)});
}

void ExperimentReport::merge(const ExperimentReport& other, const std::string& prefix) {
  for (const auto& [k, v] : other.summary_) set(prefix + k, v);
  for (const auto& v : other.verdicts_) verdicts_.push_back({prefix + v.name, v.pass, v.detail});
}

bool ExperimentReport::passed() const {
  for (const auto& v : verdicts_) {
    if (!v.pass) return false;
  }
  return true;
}

std::string ExperimentReport::csv() const {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  if (!columns_.empty()) line(columns_);
  for (const auto& r : rows_) line(r);
  return out.str();
}

std::string ExperimentReport::summary() const {
  std::ostringstream out;
  out << "experiment=" << experiment_ << '\n';
  for (const auto& [k, v] : summary_) out << k << '=' << v << '\n';
  for (const auto& v : verdicts_) {
    out << "verdict." << v.name << '=' << (v.pass ? "PASS" : "FAIL");
    if (!v.detail.empty()) out << " (" << v.detail << ')';
    out << '\n';
  }
  out << "result=" << (passed() ? "PASS" : "FAIL") << '\n';
  return out.str();
}

std::filesystem::path ExperimentReport::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  auto csv_path = dir / (stem_ + ".csv");
  std::ofstream(csv_path) << csv();
  std::ofstream(dir / (stem_ + ".summary")) << summary();
  return csv_path;
}

}  // namespace mixoram
