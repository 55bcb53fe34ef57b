#pragma once

#include <filesystem>
#include <json.hpp>
#include <string_view>

#include "quadlab/config.hpp"

namespace quadlab::detail {

nlohmann::json parse_document(std::string_view text, ConfigFormat format);
nlohmann::json load_document(const std::filesystem::path& path);

DomainWeight domain_weight_from_json(const nlohmann::json& j);
nlohmann::json domain_weight_json(const DomainWeight& w);

}  // namespace quadlab::detail
