#include "draftlab/report.hpp"

#include <chrono>
#include <iomanip>
#include <sstream>

#include "draftlab/errors.hpp"
#include "draftlab/version.hpp"

namespace draftlab::io {

namespace {

std::string now_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string scalar_to_string(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void render_value(std::ostringstream& out, const std::string& indent, const std::string& key,
                  const nlohmann::json& value) {
  if (value.is_object()) {
    out << indent << key << ":\n";
    for (const auto& [k, v] : value.items()) render_value(out, indent + "  ", k, v);
  } else if (value.is_array() && !value.empty() && value.front().is_object()) {
    out << indent << key << ": [" << value.size() << " rows]\n";
  } else {
    out << indent << std::left << std::setw(32) << key << scalar_to_string(value) << "\n";
  }
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  std::ostringstream out;
  out << std::hex << std::setfill('0') << std::setw(16) << h;
  return out.str();
}

std::string config_hash(const nlohmann::json& resolved_config) {
  return hash_hex(fnv1a64(resolved_config.dump()));
}

RunReport::RunReport(std::string command, const nlohmann::json& resolved_config,
                     std::uint64_t seed) {
  payload_["command"] = std::move(command);
  payload_["config_hash"] = config_hash(resolved_config);
  payload_["seed"] = seed;
  payload_["tables"] = nlohmann::json::object();
}

void RunReport::add_table(const std::string& name, const std::string& module,
                          nlohmann::json data) {
  payload_["tables"][name] = {{"module", module},
                              {"module_version", kVersion},
                              {"data", std::move(data)}};
}

void RunReport::set_field(const std::string& key, nlohmann::json value) {
  payload_[key] = std::move(value);
}

std::string RunReport::payload_hash() const { return hash_hex(fnv1a64(payload_.dump())); }

nlohmann::json RunReport::to_json() const {
  nlohmann::json doc;
  doc["meta"] = {{"command", payload_.at("command")},
                 {"timestamp", now_utc()},
                 {"version", kVersion}};
  doc["payload"] = payload_;
  doc["payload_hash"] = payload_hash();
  return doc;
}

std::string RunReport::render_text() const {
  std::ostringstream out;
  out << "== " << payload_.at("command").get<std::string>() << " report ==\n";
  for (const auto& [key, value] : payload_.items()) {
    if (key == "tables" || key == "command") continue;
    render_value(out, "", key, value);
  }
  for (const auto& [name, table] : payload_.at("tables").items()) {
    out << "\n-- " << name << " (" << table.at("module").get<std::string>() << " v"
        << table.at("module_version").get<std::string>() << ") --\n";
    render_value(out, "", "data", table.at("data"));
  }
  out << "\npayload_hash " << payload_hash() << "\n";
  return out.str();
}

std::string RunReport::render_file(const nlohmann::json& document) {
  if (!document.is_object() || !document.contains("payload") ||
      !document.contains("payload_hash")) {
    throw ConfigError("not a run report document");
  }
  const std::string recomputed = hash_hex(fnv1a64(document.at("payload").dump()));
  if (recomputed != document.at("payload_hash").get<std::string>()) {
    throw ConfigError("payload hash mismatch: report was modified");
  }
  RunReport report("", nlohmann::json::object(), 0);
  report.payload_ = document.at("payload");
  return report.render_text();
}

}  // namespace draftlab::io
