#include "biconf/report.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace biconf {

using ojson = nlohmann::ordered_json;

const char* const kMethodNote =
    "Residuals are evaluated at finitely many admissible rational sample points, exactly in exact mode. "
    "They are real-analytic on the connected sampled region, so one nonzero value certifies that a "
    "residual does not vanish identically, while vanishing at every sample is evidence, not proof, of an "
    "identity. Unique continuation for biharmonic maps carries a verdict from an open subset to the whole "
    "domain.";

ReportFormat parse_format(std::string_view name) {
    if (name == "json") {
        return ReportFormat::json;
    }
    if (name == "csv") {
        return ReportFormat::csv;
    }
    if (name == "table") {
        return ReportFormat::table;
    }
    throw std::invalid_argument("unknown report format '" + std::string(name) + "' (json, csv, table)");
}

std::string_view format_extension(ReportFormat format) {
    switch (format) {
    case ReportFormat::json:
        return "json";
    case ReportFormat::csv:
        return "csv";
    case ReportFormat::table:
        return "txt";
    }
    return "txt";
}

bool CheckReport::all_match() const {
    return std::all_of(instances.begin(), instances.end(), [](const auto& i) { return i.match; });
}

bool BiharmonicSweep::all_match() const {
    return std::all_of(cells.begin(), cells.end(), [](const auto& c) { return c.match; });
}

bool PolySweep::all_match() const {
    return std::all_of(cells.begin(), cells.end(), [](const auto& c) { return c.match; });
}

bool SelftestReport::passed() const {
    return std::all_of(suites.begin(), suites.end(), [](const auto& s) { return s.passed(); });
}

namespace {

ojson rationals(std::span<const Rational> v) {
    ojson out = ojson::array();
    for (const auto& q : v) {
        out.push_back(to_string(q));
    }
    return out;
}

std::string joined(std::span<const Rational> v, char sep = ' ') {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) {
            out += sep;
        }
        out += to_string(v[i]);
    }
    return out;
}

ojson map_json(const MobiusMap& map) {
    ojson a = ojson::array();
    for (int i = 0; i < map.dim(); ++i) {
        ojson row = ojson::array();
        for (int j = 0; j < map.dim(); ++j) {
            row.push_back(to_string(map.A(i, j)));
        }
        a.push_back(std::move(row));
    }
    return ojson{{"a", rationals(map.a)},
                 {"b", rationals(map.b)},
                 {"k", to_string(map.k)},
                 {"A", std::move(a)},
                 {"epsilon", map.epsilon}};
}

ojson model_json(const SpaceFormModel& model) {
    return ojson{{"model", std::string(model.name())}, {"dim", model.dim()}};
}

ojson entry_json(const ResidualEntry& e) {
    return ojson{{"norm", e.norm}, {"scale", e.scale}, {"zero", e.zero}};
}

ojson mode_fields(Mode mode, double tol) {
    ojson out{{"mode", std::string(mode_name(mode))}};
    if (mode == Mode::floating) {
        out["tolerance"] = tol;
    }
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

std::string yes_no(bool b) {
    return b ? "yes" : "no";
}

// Left-aligned text table with a header rule.
std::string text_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) {
        width[i] = header[i].size();
    }
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            width[i] = std::max(width[i], row[i].size());
        }
    }
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) {
                s += "  ";
            }
            s += cells[i];
            if (i + 1 < cells.size()) {
                s.append(width[i] - cells[i].size(), ' ');
            }
        }
        out << s << '\n';
    };
    line(header);
    std::vector<std::string> rule;
    for (auto w : width) {
        rule.emplace_back(w, '-');
    }
    line(rule);
    for (const auto& row : rows) {
        line(row);
    }
    return out.str();
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out << (i > 0 ? "," : "") << csv_field(cells[i]);
        }
        out << '\n';
    };
    line(header);
    for (const auto& row : rows) {
        line(row);
    }
    return out.str();
}

std::string instance_label(const InstanceReport& r, std::size_t i) {
    return r.name.empty() ? "instance-" + std::to_string(i) : r.name;
}

}  // namespace

ojson to_json(const CheckReport& r) {
    ojson out{{"command", "check"}};
    out.update(mode_fields(r.mode, r.tol));
    out["method"] = kMethodNote;
    ojson instances = ojson::array();
    for (std::size_t n = 0; n < r.instances.size(); ++n) {
        const auto& ir = r.instances[n];
        const auto& inst = ir.instance;
        ojson j{{"name", instance_label(ir, n)},
                {"description", inst.describe()},
                {"domain", model_json(inst.domain)},
                {"target", model_json(inst.target)},
                {"map", map_json(inst.map)}};
        if (inst.reduced) {
            j["reduced"] = ojson{{"c", to_string(inst.reduced->c)},
                                 {"d", rationals(inst.reduced->d)},
                                 {"sign", inst.reduced->sign == DenominatorSign::plus ? "+" : "-"}};
        } else {
            j["reduced"] = nullptr;
        }
        if (ir.check == CheckKind::biharmonic) {
            j["check"] = ojson{{"kind", "biharmonic"}};
        } else {
            j["check"] = ojson{{"kind", "polyharmonic"}, {"order", ir.order}};
        }
        if (ir.plan.explicit_points.empty()) {
            j["sample"] = ojson{{"seed", ir.plan.seed},
                                {"count", ir.plan.count},
                                {"radius", to_string(ir.plan.radius)},
                                {"exclusion", to_string(ir.plan.exclusion)}};
        } else {
            j["sample"] = ojson{{"explicit", ir.plan.explicit_points.size()}};
        }

        ojson points = ojson::array();
        if (ir.check == CheckKind::biharmonic) {
            int cl_nonzero = 0;
            int sdl_zero = 0;
            int harmonic = 0;
            for (const auto& p : ir.points) {
                cl_nonzero += p.cl.zero ? 0 : 1;
                sdl_zero += p.sdl.zero ? 1 : 0;
                harmonic += p.harmonic ? 1 : 0;
                points.push_back(ojson{{"index", p.index},
                                       {"x", rationals(p.x)},
                                       {"lambda", p.lambda},
                                       {"harmonic", p.harmonic},
                                       {"residuals",
                                        ojson{{"CL", entry_json(p.cl)},
                                              {"SDL", entry_json(p.sdl)},
                                              {"ND", entry_json(p.nd)},
                                              {"ND2", entry_json(p.nd2)}}},
                                       {"identities",
                                        ojson{{"ND=SDL", p.nd_equals_sdl},
                                              {"ND2=-SDL", p.nd2_equals_minus_sdl},
                                              {"ND=2SDL", p.nd_equals_twice_sdl},
                                              {"ND2=2SDL", p.nd2_equals_twice_sdl}}}});
            }
            j["points"] = std::move(points);
            j["summary"] = ojson{{"evaluated", ir.points.size()},
                                 {"cl_nonzero", cl_nonzero},
                                 {"sdl_zero", sdl_zero},
                                 {"harmonic_points", harmonic}};
        } else {
            std::vector<int> zero_counts(static_cast<std::size_t>(ir.order), 0);
            int closed_form = 0;
            for (const auto& p : ir.poly_points) {
                ojson orders = ojson::array();
                for (const auto& o : p.orders) {
                    zero_counts[static_cast<std::size_t>(o.order - 1)] += o.zero ? 1 : 0;
                    orders.push_back(ojson{{"order", o.order}, {"norm", o.norm}, {"scale", o.scale}, {"zero", o.zero}});
                }
                closed_form += p.closed_form_match ? 1 : 0;
                points.push_back(ojson{{"index", p.index},
                                       {"x", rationals(p.x)},
                                       {"orders", std::move(orders)},
                                       {"closed_form_match", p.closed_form_match}});
            }
            j["points"] = std::move(points);
            j["summary"] = ojson{{"evaluated", ir.poly_points.size()},
                                 {"zero_by_order", zero_counts},
                                 {"closed_form_matches", closed_form}};
        }
        ojson skipped = ojson::array();
        for (const auto& s : ir.skipped) {
            skipped.push_back(ojson{{"index", s.index}, {"x", rationals(s.x)}, {"error", s.error}});
        }
        j["skipped"] = std::move(skipped);
        j["verdict"] = ir.verdict;
        j["expected"] = ir.expected ? ojson(*ir.expected) : ojson(nullptr);
        j["match"] = ir.match;
        instances.push_back(std::move(j));
    }
    out["instances"] = std::move(instances);
    out["all_match"] = r.all_match();
    if (r.seconds) {
        out["seconds"] = *r.seconds;
    }
    return out;
}

ojson to_json(const BiharmonicSweep& r) {
    ojson out{{"command", "sweep-biharmonic"}};
    out.update(mode_fields(r.mode, 0));
    out.erase("tolerance");
    out["seed"] = r.seed;
    out["trials"] = r.trials;
    out["points"] = r.points;
    out["method"] = kMethodNote;
    ojson cells = ojson::array();
    for (const auto& c : r.cells) {
        ojson trials = ojson::array();
        for (const auto& t : c.trials) {
            trials.push_back(ojson{{"map", map_json(t.map)},
                                   {"sample_seed", t.sample_seed},
                                   {"verdict", t.verdict},
                                   {"evaluated", t.evaluated},
                                   {"sdl_zero", t.sdl_zero},
                                   {"harmonic_points", t.harmonic_points},
                                   {"cl_nonzero", t.cl_nonzero},
                                   {"skipped", t.skipped}});
        }
        cells.push_back(ojson{{"m", c.m},
                              {"c1", c.c1},
                              {"c2", c.c2},
                              {"epsilon", c.epsilon},
                              {"verdict", c.verdict},
                              {"expected", c.expected},
                              {"match", c.match},
                              {"trials", std::move(trials)}});
    }
    out["cells"] = std::move(cells);
    out["all_match"] = r.all_match();
    if (r.seconds) {
        out["seconds"] = *r.seconds;
    }
    return out;
}

ojson to_json(const PolySweep& r) {
    ojson out{{"command", "sweep-polyharmonic"}};
    out.update(mode_fields(r.mode, 0));
    out.erase("tolerance");
    out["seed"] = r.seed;
    out["points"] = r.points;
    out["method"] = kMethodNote;
    ojson cells = ojson::array();
    for (const auto& c : r.cells) {
        cells.push_back(ojson{{"k", c.k},
                              {"m", c.m},
                              {"zero", c.zero},
                              {"lower_zero", c.lower_zero},
                              {"proper", c.proper},
                              {"expected_zero", c.expected_zero},
                              {"expected_proper", c.expected_proper},
                              {"closed_form_match", c.closed_form_match},
                              {"match", c.match}});
    }
    out["cells"] = std::move(cells);
    out["all_match"] = r.all_match();
    if (r.seconds) {
        out["seconds"] = *r.seconds;
    }
    return out;
}

ojson to_json(const SelftestReport& r) {
    ojson out{{"command", "selftest"}};
    out.update(mode_fields(r.mode, r.tol));
    ojson suites = ojson::array();
    for (const auto& s : r.suites) {
        suites.push_back(
            ojson{{"name", s.name}, {"passed", s.passed()}, {"checks", s.checks}, {"failures", s.failures}});
    }
    out["suites"] = std::move(suites);
    out["passed"] = r.passed();
    if (r.seconds) {
        out["seconds"] = *r.seconds;
    }
    return out;
}

std::string render(const CheckReport& r, ReportFormat format) {
    if (format == ReportFormat::json) {
        return to_json(r).dump(2) + "\n";
    }
    std::vector<std::vector<std::string>> rows;
    if (format == ReportFormat::csv) {
        for (std::size_t n = 0; n < r.instances.size(); ++n) {
            const auto& ir = r.instances[n];
            const std::string label = instance_label(ir, n);
            for (const auto& p : ir.points) {
                rows.push_back({label, std::to_string(p.index), joined(p.x), p.lambda, format_double(p.cl.norm),
                                yes_no(p.cl.zero), format_double(p.sdl.norm), yes_no(p.sdl.zero),
                                format_double(p.nd.norm), yes_no(p.nd.zero), format_double(p.nd2.norm),
                                yes_no(p.nd2.zero), yes_no(p.harmonic), ir.verdict});
            }
            for (const auto& p : ir.poly_points) {
                const auto& last = p.orders.back();
                rows.push_back({label, std::to_string(p.index), joined(p.x), "", "", "", format_double(last.norm),
                                yes_no(last.zero), "", "", "", "", "", ir.verdict});
            }
        }
        return csv({"instance", "point", "x", "lambda", "cl_norm", "cl_zero", "sdl_norm", "sdl_zero", "nd_norm",
                    "nd_zero", "nd2_norm", "nd2_zero", "harmonic", "verdict"},
                   rows);
    }
    for (std::size_t n = 0; n < r.instances.size(); ++n) {
        const auto& ir = r.instances[n];
        const std::size_t evaluated = ir.check == CheckKind::biharmonic ? ir.points.size() : ir.poly_points.size();
        rows.push_back({instance_label(ir, n), ir.instance.describe(),
                        ir.check == CheckKind::biharmonic ? "biharmonic" : "polyharmonic k=" + std::to_string(ir.order),
                        std::to_string(evaluated), std::to_string(ir.skipped.size()), ir.verdict,
                        ir.expected.value_or("-"), yes_no(ir.match)});
    }
    return text_table({"instance", "maps", "check", "points", "skipped", "verdict", "expected", "match"}, rows);
}

std::string render(const BiharmonicSweep& r, ReportFormat format) {
    if (format == ReportFormat::json) {
        return to_json(r).dump(2) + "\n";
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : r.cells) {
        int evaluated = 0;
        int sdl_zero = 0;
        int harmonic = 0;
        int cl_nonzero = 0;
        for (const auto& t : c.trials) {
            evaluated += t.evaluated;
            sdl_zero += t.sdl_zero;
            harmonic += t.harmonic_points;
            cl_nonzero += t.cl_nonzero;
        }
        rows.push_back({std::to_string(c.m), std::to_string(c.c1), std::to_string(c.c2), std::to_string(c.epsilon),
                        c.verdict, c.expected, yes_no(c.match), std::to_string(evaluated), std::to_string(sdl_zero),
                        std::to_string(harmonic), std::to_string(cl_nonzero)});
    }
    const std::vector<std::string> header{"m",        "c1",    "c2",        "epsilon",  "verdict",        "expected",
                                          "match",    "evaluated", "sdl_zero", "harmonic_points", "cl_nonzero"};
    return format == ReportFormat::csv ? csv(header, rows) : text_table(header, rows);
}

std::string render(const PolySweep& r, ReportFormat format) {
    if (format == ReportFormat::json) {
        return to_json(r).dump(2) + "\n";
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : r.cells) {
        rows.push_back({std::to_string(c.k), std::to_string(c.m), yes_no(c.zero), yes_no(c.proper),
                        yes_no(c.expected_zero), yes_no(c.expected_proper), yes_no(c.closed_form_match),
                        yes_no(c.match), std::to_string(c.points)});
    }
    const std::vector<std::string> header{"k",      "m", "zero", "proper", "expected_zero", "expected_proper",
                                          "closed_form_match", "match", "points"};
    return format == ReportFormat::csv ? csv(header, rows) : text_table(header, rows);
}

std::string render(const SelftestReport& r, ReportFormat format) {
    if (format == ReportFormat::json) {
        return to_json(r).dump(2) + "\n";
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : r.suites) {
        rows.push_back({s.name, s.passed() ? "pass" : "FAIL", std::to_string(s.checks),
                        s.failures.empty() ? "" : s.failures.front()});
    }
    const std::vector<std::string> header{"suite", "result", "checks", "first_failure"};
    return format == ReportFormat::csv ? csv(header, rows) : text_table(header, rows);
}

}  // namespace biconf
