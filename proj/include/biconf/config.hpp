#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "biconf/residuals.hpp"
#include "biconf/sampling.hpp"

namespace biconf {

enum class CheckKind { biharmonic, polyharmonic };

struct InstanceConfig {
    std::string name;
    ConformalInstance instance;
    CheckKind check = CheckKind::biharmonic;
    int order = 2;                        // polyharmonic order k
    std::optional<std::string> expect;    // expected verdict
    SamplePlan plan;
};

// Accepts a single instance object or {"instances": [...]} with an optional
// shared "sample" block; per-instance "sample" blocks override it. Every
// problem, from malformed JSON to a non-orthogonal A, is a ConfigError.
std::vector<InstanceConfig> parse_config(const nlohmann::json& doc);
std::vector<InstanceConfig> load_config(const std::filesystem::path& path);

// Pieces shared with tests.
Rational json_rational(const nlohmann::json& v, const std::string& what);
RationalMatrix parse_orthogonal(const nlohmann::json& node, int dim);

}  // namespace biconf
