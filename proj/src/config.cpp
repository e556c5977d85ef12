#include "biconf/config.hpp"

#include <fstream>
#include <set>

namespace biconf {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw ConfigError(msg);
}

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
        fail(where + ": missing \"" + key + "\"");
    }
    return obj.at(key);
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
        if (!keys.contains(key)) {
            fail(where + ": unknown field \"" + key + "\"");
        }
    }
}

int json_int(const json& v, const std::string& what) {
    if (!v.is_number_integer()) {
        fail(what + " must be an integer");
    }
    return v.get<int>();
}

SpaceFormModel parse_model(const json& v, const std::string& where) {
    if (!v.is_object()) {
        fail(where + " must be an object");
    }
    reject_unknown(v, {"model", "dim"}, where);
    const json& name = require(v, "model", where);
    if (!name.is_string()) {
        fail(where + ".model must be a string");
    }
    const int dim = json_int(require(v, "dim", where), where + ".dim");
    if (dim < 2) {
        fail(where + ".dim must be >= 2");
    }
    try {
        return SpaceFormModel(parse_chart(name.get<std::string>()), dim);
    } catch (const std::invalid_argument& e) {
        fail(where + ": " + e.what());
    }
}

RationalVector parse_vector(const json& v, int dim, const std::string& what) {
    if (!v.is_array() || static_cast<int>(v.size()) != dim) {
        fail(what + " must be an array of " + std::to_string(dim) + " rationals");
    }
    RationalVector out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(json_rational(v[i], what + "[" + std::to_string(i) + "]"));
    }
    return out;
}

RationalMatrix parse_square(const json& v, int dim, const std::string& what) {
    if (!v.is_array() || static_cast<int>(v.size()) != dim) {
        fail(what + " must be a " + std::to_string(dim) + "x" + std::to_string(dim) + " array");
    }
    RationalMatrix out(dim);
    for (int i = 0; i < dim; ++i) {
        const auto row = parse_vector(v[static_cast<std::size_t>(i)], dim, what + "[" + std::to_string(i) + "]");
        for (int j = 0; j < dim; ++j) {
            out(i, j) = row[static_cast<std::size_t>(j)];
        }
    }
    return out;
}

std::vector<int> int_list(const json& v, int dim, const std::string& what) {
    if (!v.is_array() || static_cast<int>(v.size()) != dim) {
        fail(what + " must be an array of " + std::to_string(dim) + " integers");
    }
    std::vector<int> out;
    for (const auto& e : v) {
        out.push_back(json_int(e, what));
    }
    return out;
}

SamplePlan parse_sample(const json& v, SamplePlan plan, int dim) {
    if (!v.is_object()) {
        fail("sample must be an object");
    }
    reject_unknown(v, {"seed", "count", "radius", "exclusion", "points"}, "sample");
    if (v.contains("seed")) {
        if (!v["seed"].is_number_integer() || v["seed"].get<std::int64_t>() < 0) {
            fail("sample.seed must be a nonnegative integer");
        }
        plan.seed = v["seed"].get<std::uint64_t>();
    }
    if (v.contains("count")) {
        plan.count = json_int(v["count"], "sample.count");
        if (plan.count < 1) {
            fail("sample.count must be >= 1");
        }
    }
    if (v.contains("radius")) {
        plan.radius = json_rational(v["radius"], "sample.radius");
        if (sgn(plan.radius) <= 0) {
            fail("sample.radius must be positive");
        }
    }
    if (v.contains("exclusion")) {
        plan.exclusion = json_rational(v["exclusion"], "sample.exclusion");
        if (sgn(plan.exclusion) < 0) {
            fail("sample.exclusion must be nonnegative");
        }
    }
    if (v.contains("points")) {
        const json& pts = v["points"];
        if (!pts.is_array() || pts.empty()) {
            fail("sample.points must be a non-empty array");
        }
        plan.explicit_points.clear();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            plan.explicit_points.push_back(parse_vector(pts[i], dim, "sample.points[" + std::to_string(i) + "]"));
        }
    }
    return plan;
}

InstanceConfig parse_instance(const json& v, const SamplePlan& shared, const std::string& where) {
    if (!v.is_object()) {
        fail(where + " must be an object");
    }
    reject_unknown(v, {"domain", "target", "map", "sample", "check", "expect", "name"}, where);
    const SpaceFormModel domain = parse_model(require(v, "domain", where), where + ".domain");
    const SpaceFormModel target = parse_model(require(v, "target", where), where + ".target");
    if (domain.dim() != target.dim()) {
        fail(where + ": domain and target dimensions differ");
    }
    const int m = domain.dim();

    const json& mv = require(v, "map", where);
    if (!mv.is_object()) {
        fail(where + ".map must be an object");
    }
    reject_unknown(mv, {"a", "b", "k", "A", "epsilon"}, where + ".map");
    MobiusMap map;
    map.a = parse_vector(require(mv, "a", where + ".map"), m, where + ".map.a");
    map.b = parse_vector(require(mv, "b", where + ".map"), m, where + ".map.b");
    map.k = json_rational(require(mv, "k", where + ".map"), where + ".map.k");
    map.A = mv.contains("A") ? parse_orthogonal(mv["A"], m) : RationalMatrix::identity(m);
    map.epsilon = json_int(require(mv, "epsilon", where + ".map"), where + ".map.epsilon");

    InstanceConfig cfg{"", ConformalInstance{domain, target, map, std::nullopt}, CheckKind::biharmonic, 2,
                       std::nullopt, shared};
    if (v.contains("name")) {
        if (!v["name"].is_string()) {
            fail(where + ".name must be a string");
        }
        cfg.name = v["name"].get<std::string>();
    }
    try {
        cfg.instance = make_instance(domain, target, map);
    } catch (const ValidationError& e) {
        fail(where + ": " + e.what());
    }

    if (v.contains("sample")) {
        cfg.plan = parse_sample(v["sample"], shared, m);
    }
    if (v.contains("check")) {
        const json& c = v["check"];
        const std::string kind = c.is_string() ? c.get<std::string>()
                                 : c.is_object() && c.contains("kind") && c["kind"].is_string()
                                     ? c["kind"].get<std::string>()
                                     : std::string();
        if (kind == "biharmonic") {
            cfg.check = CheckKind::biharmonic;
        } else if (kind == "polyharmonic") {
            cfg.check = CheckKind::polyharmonic;
            if (!c.is_object() || !c.contains("order")) {
                fail(where + ".check: polyharmonic needs an \"order\"");
            }
            cfg.order = json_int(c["order"], where + ".check.order");
            if (cfg.order < 1) {
                fail(where + ".check.order must be >= 1");
            }
            if (domain.chart() != Chart::flat || target.chart() != Chart::flat) {
                fail(where + ": polyharmonic checks need flat domain and target");
            }
        } else {
            fail(where + ".check must be \"biharmonic\" or {\"kind\": \"polyharmonic\", \"order\": k}");
        }
    }
    if (v.contains("expect")) {
        if (!v["expect"].is_string()) {
            fail(where + ".expect must be a string");
        }
        cfg.expect = v["expect"].get<std::string>();
    }
    return cfg;
}

}  // namespace

Rational json_rational(const json& v, const std::string& what) {
    if (v.is_number_integer()) {
        return Rational(v.get<long>());
    }
    if (!v.is_string()) {
        fail(what + " must be a \"p/q\" string or an integer");
    }
    try {
        return parse_rational(v.get<std::string>());
    } catch (const std::exception& e) {
        fail(what + ": " + e.what());
    }
}

RationalMatrix parse_orthogonal(const json& node, int dim) {
    if (!node.is_object()) {
        fail("map.A must be an object with a \"kind\"");
    }
    reject_unknown(node, {"kind", "data"}, "map.A");
    const json& kind = require(node, "kind", "map.A");
    if (!kind.is_string()) {
        fail("map.A.kind must be a string");
    }
    const std::string k = kind.get<std::string>();
    try {
        if (k == "identity") {
            return RationalMatrix::identity(dim);
        }
        if (k == "permutation") {
            const json& data = require(node, "data", "map.A");
            if (data.is_array()) {
                const auto perm = int_list(data, dim, "map.A.data");
                const std::vector<int> signs(static_cast<std::size_t>(dim), 1);
                return signed_permutation(perm, signs);
            }
            const auto perm = int_list(require(data, "perm", "map.A.data"), dim, "map.A.data.perm");
            const auto signs = data.contains("signs") ? int_list(data["signs"], dim, "map.A.data.signs")
                                                      : std::vector<int>(static_cast<std::size_t>(dim), 1);
            return signed_permutation(perm, signs);
        }
        if (k == "cayley") {
            return cayley_orthogonal(parse_square(require(node, "data", "map.A"), dim, "map.A.data"));
        }
    } catch (const ValidationError& e) {
        fail(std::string("map.A: ") + e.what());
    }
    fail("map.A.kind must be identity, permutation or cayley");
}

std::vector<InstanceConfig> parse_config(const json& doc) {
    if (!doc.is_object()) {
        fail("config must be a JSON object");
    }
    if (!doc.contains("instances")) {
        if (!doc.contains("domain")) {
            fail("config needs \"domain\"/\"target\"/\"map\" or an \"instances\" array");
        }
        return {parse_instance(doc, SamplePlan{}, "config")};
    }
    reject_unknown(doc, {"instances", "sample"}, "config");
    const json& list = doc["instances"];
    if (!list.is_array() || list.empty()) {
        fail("config.instances must be a non-empty array");
    }
    SamplePlan shared;
    if (doc.contains("sample")) {
        const json& s = doc["sample"];
        if (s.is_object() && s.contains("points")) {
            fail("config.sample.points must be given per instance");
        }
        shared = parse_sample(s, shared, 0);
    }
    std::vector<InstanceConfig> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        out.push_back(parse_instance(list[i], shared, "instances[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<InstanceConfig> load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        fail("cannot open config file " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

}  // namespace biconf
