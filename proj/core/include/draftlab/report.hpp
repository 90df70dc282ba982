#pragma once

/**
 * @file report.hpp
 * @brief Run reports: a hash-checked payload plus loose metadata.
 *
 * The payload (command, config hash, seed, metric tables) is the
 * deterministic region: identical inputs must reproduce it byte for byte,
 * and `payload_hash` witnesses that. Timestamps live in `meta`, outside the
 * hashed region. Each table is labeled with the producing module and its
 * version.
 */

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace draftlab::io {

/// FNV-1a 64-bit hash, rendered as fixed-width hex.
std::uint64_t fnv1a64(const std::string& text);
std::string hash_hex(std::uint64_t h);

/// Hash of a resolved configuration (canonical dump).
std::string config_hash(const nlohmann::json& resolved_config);

class RunReport {
public:
  RunReport(std::string command, const nlohmann::json& resolved_config, std::uint64_t seed);

  /// Adds a named metric table labeled with its producing module.
  void add_table(const std::string& name, const std::string& module, nlohmann::json data);

  /// Extra scalar fields in the hashed region.
  void set_field(const std::string& key, nlohmann::json value);

  const nlohmann::json& payload() const { return payload_; }
  std::string payload_hash() const;

  /// Full document: {meta, payload, payload_hash}.
  nlohmann::json to_json() const;

  /// Aligned human-readable tables.
  std::string render_text() const;

  /// Re-renders a previously written report; verifies the payload hash and
  /// raises ConfigError on mismatch.
  static std::string render_file(const nlohmann::json& document);

private:
  nlohmann::json payload_;
};

}  // namespace draftlab::io
