#include "quadlab/config.hpp"

#include <fstream>
#include <sstream>

#define TOML_EXCEPTIONS 1
#define TOML_HEADER_ONLY 1
#include <toml.hpp>

#include "config_util.hpp"
#include "json_util.hpp"
#include "quadlab/errors.hpp"

namespace quadlab {

namespace detail {

namespace {

nlohmann::json to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : *t) j[std::string(k.str())] = to_json(v);
    return j;
  }
  if (const auto* a = node.as_array()) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& v : *a) j.push_back(to_json(v));
    return j;
  }
  if (const auto* v = node.as_string()) return v->get();
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  throw PreconditionError("config: dates and times are not supported");
}

}  // namespace

nlohmann::json parse_document(std::string_view text, ConfigFormat format) {
  if (format == ConfigFormat::Json) {
    try {
      return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw PreconditionError(std::string("config: invalid JSON: ") + e.what());
    }
  }
  try {
    return to_json(toml::parse(text));
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "config: invalid TOML at line " << e.source().begin.line << ": " << e.description();
    throw PreconditionError(os.str());
  }
}

nlohmann::json load_document(const std::filesystem::path& path) {
  return parse_document(read_text_file(path), format_for(path));
}

DomainWeight domain_weight_from_json(const nlohmann::json& j) {
  try {
    const Domain domain = parse_domain(j.at("domain").get<std::string>());
    const int d = j.value("dim", 2);
    std::vector<double> kappa = j.value("kappa", std::vector<double>{});
    const double mu = j.value("mu", 0.5);
    return DomainWeight(domain, d, std::move(kappa), mu);
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("config: bad domain weight: ") + e.what());
  }
}

nlohmann::json domain_weight_json(const DomainWeight& w) {
  return {{"domain", domain_name(w.domain)}, {"dim", w.dim}, {"mu", w.mu}, {"kappa", w.kappa}};
}

}  // namespace detail

ConfigFormat format_for(const std::filesystem::path& path) {
  return path.extension() == ".json" ? ConfigFormat::Json : ConfigFormat::Toml;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ProductWeight parse_weight(std::string_view text, ConfigFormat format) {
  const nlohmann::json j = detail::parse_document(text, format);
  try {
    return detail::weight_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("config: bad weight: ") + e.what());
  }
}

ProductWeight load_weight(const std::filesystem::path& path) {
  return parse_weight(read_text_file(path), format_for(path));
}

DomainWeight parse_domain_weight(std::string_view text, ConfigFormat format) {
  return detail::domain_weight_from_json(detail::parse_document(text, format));
}

DomainWeight load_domain_weight(const std::filesystem::path& path) {
  return parse_domain_weight(read_text_file(path), format_for(path));
}

std::string config_to_json(std::string_view text, ConfigFormat format) {
  return detail::parse_document(text, format).dump();
}

}  // namespace quadlab
