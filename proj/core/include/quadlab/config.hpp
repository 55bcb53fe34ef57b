#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "quadlab/domains.hpp"
#include "quadlab/weights.hpp"

namespace quadlab {

enum class ConfigFormat { Toml, Json };

/// ".json" → Json, anything else → Toml.
ConfigFormat format_for(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

/// Sphere weight:
///   dim = 2
///   [[factors]]                      # or: axis_kappas = [0, 0, 1]
///   direction = [0, 0, 1]            # normalized on load
///   kappa = 1.0
/// JSON uses the same keys.
ProductWeight parse_weight(std::string_view text, ConfigFormat format);
ProductWeight load_weight(const std::filesystem::path& path);

/// Domain weight: domain = "ball" | "simplex", dim, mu, kappa = [...].
DomainWeight parse_domain_weight(std::string_view text, ConfigFormat format);
DomainWeight load_domain_weight(const std::filesystem::path& path);

/// TOML or JSON document re-encoded as JSON text (keys sorted).
std::string config_to_json(std::string_view text, ConfigFormat format);

}  // namespace quadlab
