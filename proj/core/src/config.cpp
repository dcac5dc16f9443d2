#include "mixoram/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "mixoram/error.hpp"

namespace mixoram {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

const std::string* find(const ConfigMap& cfg, const std::string& key) {
  auto it = cfg.find(key);
  return it == cfg.end() ? nullptr : &it->second;
}

}  // namespace

ConfigMap parse_config(std::string_view text) {
  ConfigMap out;
  std::size_t lineno = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(Errc::kInvalidArgument, "config line " + std::to_string(lineno) + " has no '='");
    }
    auto key = trim(line.substr(0, eq));
    if (key.empty()) fail(Errc::kInvalidArgument, "config line " + std::to_string(lineno) + " has no key");
    out[std::string(key)] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

ConfigMap load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::kInvalidArgument, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::uint64_t config_u64(const ConfigMap& cfg, const std::string& key, std::uint64_t fallback) {
  const auto* v = find(cfg, key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  auto res = std::from_chars(v->data(), v->data() + v->size(), out);
  if (res.ec != std::errc{} || res.ptr != v->data() + v->size()) {
    fail(Errc::kInvalidArgument, key + ": not an unsigned integer: " + *v);
  }
  return out;
}

double config_double(const ConfigMap& cfg, const std::string& key, double fallback) {
  const auto* v = find(cfg, key);
  if (!v) return fallback;
  double out = 0;
  auto res = std::from_chars(v->data(), v->data() + v->size(), out);
  if (res.ec != std::errc{} || res.ptr != v->data() + v->size()) {
    fail(Errc::kInvalidArgument, key + ": not a number: " + *v);
  }
  return out;
}

std::string config_string(const ConfigMap& cfg, const std::string& key, std::string fallback) {
  const auto* v = find(cfg, key);
  return v ? *v : fallback;
}

bool config_bool(const ConfigMap& cfg, const std::string& key, bool fallback) {
  const auto* v = find(cfg, key);
  if (!v) return fallback;
  if (*v == "1" || *v == "true" || *v == "yes" || *v == "on") return true;
  if (*v == "0" || *v == "false" || *v == "no" || *v == "off") return false;
  fail(Errc::kInvalidArgument, key + ": not a boolean: " + *v);
}

}  // namespace mixoram
