#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ontolab/gallery.hpp"
#include "ontolab/independence.hpp"

namespace ontolab {

enum class BackendId { float_backend, exact_backend };

inline const char* backend_id_name(BackendId b) {
    return b == BackendId::exact_backend ? "exact" : "float";
}

inline BackendId backend_from_name(std::string_view s) {
    if (s == "exact") return BackendId::exact_backend;
    if (s == "float") return BackendId::float_backend;
    throw SchemaError("unknown backend '" + std::string(s) + "' (expected \"exact\" or \"float\")");
}

// Probabilities stay verbatim strings inside documents so exact values
// survive serialization; they are parsed per backend at build time.
struct TableEntrySpec {
    Assignment assignment;
    std::string probability;
};

struct KernelSpec {
    std::vector<std::string> targets;
    std::vector<std::string> givens;
    std::vector<std::vector<std::string>> rows;
};

struct GallerySpec {
    std::string name;
    std::map<std::string, std::string> params;
};

using ModelSpec = std::variant<std::vector<TableEntrySpec>, std::vector<KernelSpec>, GallerySpec>;
using CheckSpec = std::variant<AssumptionId, CIQuery>;

struct DocOptions {
    BackendId backend = BackendId::float_backend;
    std::optional<double> tolerance;
    std::uint64_t seed = 0;
};

struct ScenarioDoc {
    int schema = 1;
    std::vector<VariableSpec> variables;
    ModelSpec model;
    std::vector<CheckSpec> checks;
    DocOptions options;

    Scenario scenario() const { return Scenario(variables); }

    double tolerance_or_default() const {
        if (options.tolerance) return *options.tolerance;
        return options.backend == BackendId::exact_backend ? 0.0 : kDefaultFloatTolerance;
    }
};

inline const std::vector<std::string>& known_gallery_names() {
    static const std::vector<std::string> names = {"pr_box",     "singlet_chsh",      "premise_random",
                                                   "adaptive_c", "outcome_revealing", "local_deterministic"};
    return names;
}

namespace detail {

using Json = nlohmann::ordered_json;

inline void reject_unknown_keys(const Json& obj, std::initializer_list<const char*> allowed,
                                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) ok = true;
        if (!ok) throw SchemaError("unknown field '" + it.key() + "' in " + where);
    }
}

inline std::string probability_string(const Json& v, BackendId backend, const std::string& where) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) {
        if (backend == BackendId::exact_backend)
            throw SchemaError("exact backend requires probabilities as strings (" + where + ")");
        return format_double(v.get<double>());
    }
    throw SchemaError("probability must be a string or number in " + where);
}

inline std::vector<std::string> name_list(const Json& v, const std::string& where) {
    if (!v.is_array()) throw SchemaError(where + " must be an array of variable names");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) throw SchemaError(where + " must contain only strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

} // namespace detail

inline ScenarioDoc parse_scenario(const std::string& bytes) {
    detail::Json doc;
    try {
        doc = detail::Json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw SyntaxError(std::string("malformed document: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("document root must be an object");
    detail::reject_unknown_keys(doc, {"ontolab_schema", "variables", "model", "checks", "options"}, "document");

    ScenarioDoc out;
    if (!doc.contains("ontolab_schema") || !doc["ontolab_schema"].is_number_integer())
        throw SchemaError("missing required field 'ontolab_schema'");
    out.schema = doc["ontolab_schema"].get<int>();
    if (out.schema != 1) throw SchemaError("unsupported ontolab_schema version");

    // options first: the backend decides how probabilities are read
    if (doc.contains("options")) {
        const auto& o = doc["options"];
        if (!o.is_object()) throw SchemaError("'options' must be an object");
        detail::reject_unknown_keys(o, {"backend", "tolerance", "seed"}, "options");
        if (o.contains("backend")) {
            if (!o["backend"].is_string()) throw SchemaError("options.backend must be a string");
            out.options.backend = backend_from_name(o["backend"].get<std::string>());
        }
        if (o.contains("tolerance")) {
            if (!o["tolerance"].is_number()) throw SchemaError("options.tolerance must be a number");
            double t = o["tolerance"].get<double>();
            if (t < 0) throw SchemaError("options.tolerance must be nonnegative");
            out.options.tolerance = t;
        }
        if (o.contains("seed")) {
            if (!o["seed"].is_number_unsigned()) throw SchemaError("options.seed must be a nonnegative integer");
            out.options.seed = o["seed"].get<std::uint64_t>();
        }
    }

    if (!doc.contains("variables") || !doc["variables"].is_array())
        throw SchemaError("missing required field 'variables'");
    for (const auto& v : doc["variables"]) {
        if (!v.is_object()) throw SchemaError("variable entries must be objects");
        detail::reject_unknown_keys(v, {"name", "role", "alphabet_size", "alias_of"}, "variable");
        VariableSpec spec;
        if (!v.contains("name") || !v["name"].is_string()) throw SchemaError("variable needs a string 'name'");
        spec.name = v["name"].get<std::string>();
        if (!v.contains("role") || !v["role"].is_string())
            throw SchemaError("variable '" + spec.name + "' needs a string 'role'");
        spec.role = role_from_name(v["role"].get<std::string>());
        if (!v.contains("alphabet_size") || !v["alphabet_size"].is_number_unsigned() ||
            v["alphabet_size"].get<std::uint64_t>() < 1)
            throw SchemaError("variable '" + spec.name + "' needs a positive 'alphabet_size'");
        spec.alphabet_size = v["alphabet_size"].get<std::size_t>();
        if (v.contains("alias_of")) {
            if (!v["alias_of"].is_string()) throw SchemaError("alias_of must be a string");
            spec.alias_of = v["alias_of"].get<std::string>();
        }
        out.variables.push_back(std::move(spec));
    }
    Scenario sc(out.variables); // validates names, sizes, aliases

    auto require_declared = [&](const std::string& name, const std::string& where) {
        if (!sc.has(name))
            throw ReferenceError("undeclared variable '" + name + "' referenced in " + where);
    };

    if (!doc.contains("model") || !doc["model"].is_object())
        throw SchemaError("missing required field 'model'");
    const auto& m = doc["model"];
    detail::reject_unknown_keys(m, {"table", "factors", "gallery", "params"}, "model");
    int sources = (m.contains("table") ? 1 : 0) + (m.contains("factors") ? 1 : 0) + (m.contains("gallery") ? 1 : 0);
    if (sources != 1) throw SchemaError("model must have exactly one of 'table', 'factors', 'gallery'");

    if (m.contains("table")) {
        if (!m["table"].is_array()) throw SchemaError("model.table must be an array");
        std::vector<TableEntrySpec> entries;
        for (const auto& e : m["table"]) {
            if (!e.is_object()) throw SchemaError("table entries must be objects");
            detail::reject_unknown_keys(e, {"assignment", "p"}, "table entry");
            if (!e.contains("assignment") || !e["assignment"].is_object())
                throw SchemaError("table entry needs an 'assignment' object");
            if (!e.contains("p")) throw SchemaError("table entry needs a probability 'p'");
            TableEntrySpec spec;
            for (auto it = e["assignment"].begin(); it != e["assignment"].end(); ++it) {
                require_declared(it.key(), "table assignment");
                if (!it.value().is_number_unsigned())
                    throw SchemaError("assignment symbols must be nonnegative integers");
                spec.assignment[it.key()] = it.value().get<std::size_t>();
            }
            spec.probability = detail::probability_string(e["p"], out.options.backend, "table entry");
            entries.push_back(std::move(spec));
        }
        // validate normalization and signs now so a bad document fails at parse
        Rational sum(0);
        for (const auto& e : entries) {
            Rational p = parse_rational(e.probability);
            if (p < 0) throw SchemaError(std::string("invalid table: ") + "NegativeEntry: entry " +
                                         e.probability + " is negative");
            sum += p;
        }
        bool ok = out.options.backend == BackendId::exact_backend
                      ? sum == 1
                      : num_abs(numeric_traits<Rational>::to_double(sum) - 1.0) <=
                            (out.options.tolerance ? *out.options.tolerance : kFloatNormTolerance);
        if (!ok)
            throw SchemaError("invalid table: NotNormalized: entries sum to " + format_number(sum) +
                              ", expected 1");
        out.model = std::move(entries);
    } else if (m.contains("factors")) {
        if (!m["factors"].is_array()) throw SchemaError("model.factors must be an array");
        std::vector<KernelSpec> factors;
        for (const auto& f : m["factors"]) {
            if (!f.is_object()) throw SchemaError("factor entries must be objects");
            detail::reject_unknown_keys(f, {"targets", "givens", "rows"}, "factor");
            KernelSpec spec;
            if (!f.contains("targets")) throw SchemaError("factor needs 'targets'");
            spec.targets = detail::name_list(f["targets"], "factor.targets");
            if (f.contains("givens")) spec.givens = detail::name_list(f["givens"], "factor.givens");
            for (const auto& n : spec.targets) require_declared(n, "factor targets");
            for (const auto& n : spec.givens) require_declared(n, "factor givens");
            if (!f.contains("rows") || !f["rows"].is_array()) throw SchemaError("factor needs 'rows'");
            for (const auto& row : f["rows"]) {
                if (!row.is_array()) throw SchemaError("factor rows must be arrays");
                std::vector<std::string> r;
                for (const auto& v : row)
                    r.push_back(detail::probability_string(v, out.options.backend, "factor row"));
                spec.rows.push_back(std::move(r));
            }
            factors.push_back(std::move(spec));
        }
        out.model = std::move(factors);
    } else {
        const auto& g = m["gallery"];
        if (!g.is_string()) throw SchemaError("model.gallery must be a string");
        GallerySpec spec;
        spec.name = g.get<std::string>();
        bool known = false;
        for (const auto& n : known_gallery_names()) known = known || n == spec.name;
        if (!known) throw SchemaError("unknown gallery model '" + spec.name + "'");
        if (m.contains("params")) {
            if (!m["params"].is_object()) throw SchemaError("model.params must be an object");
            for (auto it = m["params"].begin(); it != m["params"].end(); ++it) {
                if (it.value().is_string())
                    spec.params[it.key()] = it.value().get<std::string>();
                else if (it.value().is_number_unsigned())
                    spec.params[it.key()] = std::to_string(it.value().get<std::uint64_t>());
                else if (it.value().is_number())
                    spec.params[it.key()] = format_double(it.value().get<double>());
                else
                    throw SchemaError("gallery params must be strings or numbers");
            }
        }
        out.model = std::move(spec);
    }

    if (doc.contains("checks")) {
        if (!doc["checks"].is_array()) throw SchemaError("'checks' must be an array");
        for (const auto& c : doc["checks"]) {
            if (c.is_string()) {
                auto id = assumption_from_name(c.get<std::string>());
                if (!id)
                    throw SchemaError("unknown assumption '" + c.get<std::string>() +
                                      "' (expected FR, FRprime, NS, ST or FACT)");
                out.checks.emplace_back(*id);
            } else if (c.is_object()) {
                detail::reject_unknown_keys(c, {"target", "independent_of"}, "check");
                if (!c.contains("target") || !c.contains("independent_of"))
                    throw SchemaError("CI check needs 'target' and 'independent_of'");
                CIQuery q;
                q.target = detail::name_list(c["target"], "check.target");
                q.independent_of = detail::name_list(c["independent_of"], "check.independent_of");
                for (const auto& n : q.target) require_declared(n, "check");
                for (const auto& n : q.independent_of) require_declared(n, "check");
                out.checks.emplace_back(std::move(q));
            } else {
                throw SchemaError("checks must be assumption names or CI query objects");
            }
        }
    }
    return out;
}

inline std::string emit_scenario(const ScenarioDoc& doc) {
    detail::Json j;
    j["ontolab_schema"] = doc.schema;
    j["variables"] = detail::Json::array();
    for (const auto& v : doc.variables) {
        detail::Json jv;
        jv["name"] = v.name;
        jv["role"] = role_name(v.role);
        jv["alphabet_size"] = v.alphabet_size;
        if (v.alias_of) jv["alias_of"] = *v.alias_of;
        j["variables"].push_back(jv);
    }
    detail::Json jm;
    if (const auto* table = std::get_if<std::vector<TableEntrySpec>>(&doc.model)) {
        jm["table"] = detail::Json::array();
        for (const auto& e : *table) {
            detail::Json je;
            je["assignment"] = detail::Json::object();
            for (const auto& [k, s] : e.assignment) je["assignment"][k] = s;
            je["p"] = e.probability;
            jm["table"].push_back(je);
        }
    } else if (const auto* factors = std::get_if<std::vector<KernelSpec>>(&doc.model)) {
        jm["factors"] = detail::Json::array();
        for (const auto& f : *factors) {
            detail::Json jf;
            jf["targets"] = f.targets;
            jf["givens"] = f.givens;
            jf["rows"] = f.rows;
            jm["factors"].push_back(jf);
        }
    } else {
        const auto& g = std::get<GallerySpec>(doc.model);
        jm["gallery"] = g.name;
        jm["params"] = detail::Json::object();
        for (const auto& [k, v] : g.params) jm["params"][k] = v;
    }
    j["model"] = jm;
    j["checks"] = detail::Json::array();
    for (const auto& c : doc.checks) {
        if (const auto* id = std::get_if<AssumptionId>(&c)) {
            j["checks"].push_back(assumption_name(*id));
        } else {
            const auto& q = std::get<CIQuery>(c);
            detail::Json jq;
            jq["target"] = q.target;
            jq["independent_of"] = q.independent_of;
            j["checks"].push_back(jq);
        }
    }
    detail::Json jo;
    jo["backend"] = backend_id_name(doc.options.backend);
    if (doc.options.tolerance) jo["tolerance"] = *doc.options.tolerance;
    jo["seed"] = doc.options.seed;
    j["options"] = jo;
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// model construction from documents
// ---------------------------------------------------------------------------

namespace detail {

inline ResponseFunction response_from_name(const std::string& name) {
    if (name == "xor") return ResponseFunction::xor_response();
    if (name == "and") return ResponseFunction::and_response();
    if (name == "lambda") return ResponseFunction::copy_ontic();
    if (name == "setting") return ResponseFunction::copy_setting();
    if (name == "const0") return ResponseFunction::constant(0);
    if (name == "const1") return ResponseFunction::constant(1);
    throw SchemaError("unknown response preset '" + name +
                      "' (expected xor, and, lambda, setting, const0 or const1)");
}

inline std::string gallery_param(const GallerySpec& g, const std::string& key, const std::string& fallback) {
    auto it = g.params.find(key);
    return it == g.params.end() ? fallback : it->second;
}

template <class Num>
JointTable<Num> build_gallery_model(const GallerySpec& g, std::uint64_t seed) {
    if (g.name == "pr_box") return box_with_uniform_settings(pr_box_kernel<Num>());
    if (g.name == "singlet_chsh") {
        if constexpr (numeric_traits<Num>::is_exact) {
            throw UsageError("gallery 'singlet_chsh' is float-only (Born-rule kernels are irrational)");
        } else {
            auto s = chsh_demo_settings();
            return box_with_uniform_settings(two_qubit_kernel(TwoQubitState::singlet(), s.a, s.b));
        }
    }
    if (g.name == "premise_random") {
        std::uint64_t s = seed;
        if (auto it = g.params.find("seed"); it != g.params.end()) s = std::stoull(it->second);
        auto k = static_cast<std::size_t>(std::stoull(gallery_param(g, "alphabet", "2")));
        if (k < 1) throw SchemaError("gallery param 'alphabet' must be positive");
        return premise_model_random<Num>(s, PremiseSizes::uniform(k));
    }
    if (g.name == "adaptive_c")
        return adaptive_c_model<Num>(parse_number<Num>(gallery_param(g, "p_copy", "1")));
    if (g.name == "outcome_revealing")
        return outcome_revealing_model<Num>(response_from_name(gallery_param(g, "f", "and")));
    if (g.name == "local_deterministic") {
        OntModelSpec<Num> spec;
        const Num half = Num(1) / Num(2);
        spec.p_a = {half, half};
        spec.p_b = {half, half};
        spec.p_c = {half, half};
        spec.p_lambda = {half, half};
        spec.x_response = response_from_name(gallery_param(g, "x", "xor"));
        spec.y_response = response_from_name(gallery_param(g, "y", "xor"));
        spec.z_response = response_from_name(gallery_param(g, "z", "lambda"));
        spec.z_source = ZSource::response_c_lambda;
        return local_deterministic_model(spec);
    }
    throw SchemaError("unknown gallery model '" + g.name + "'");
}

} // namespace detail

// Builds the document's model and checks it against the declared variables.
template <class Num>
JointTable<Num> build_model(const ScenarioDoc& doc) {
    Scenario sc = doc.scenario();
    if (const auto* table = std::get_if<std::vector<TableEntrySpec>>(&doc.model)) {
        std::vector<std::pair<Assignment, Num>> entries;
        for (const auto& e : *table) entries.emplace_back(e.assignment, parse_number<Num>(e.probability));
        return build_joint(sc, entries);
    }
    if (const auto* factors = std::get_if<std::vector<KernelSpec>>(&doc.model)) {
        std::vector<ConditionalKernel<Num>> kernels;
        for (const auto& f : *factors) {
            std::vector<std::size_t> tsizes, gsizes;
            for (const auto& n : f.targets) tsizes.push_back(sc.variable(sc.index_of(n)).alphabet_size);
            for (const auto& n : f.givens) gsizes.push_back(sc.variable(sc.index_of(n)).alphabet_size);
            std::vector<std::vector<Num>> rows;
            for (const auto& r : f.rows) {
                std::vector<Num> row;
                for (const auto& v : r) row.push_back(parse_number<Num>(v));
                rows.push_back(std::move(row));
            }
            kernels.push_back(ConditionalKernel<Num>::from_rows(f.targets, f.givens, std::move(tsizes),
                                                                std::move(gsizes), std::move(rows)));
        }
        return compose_product(sc, kernels);
    }
    const auto& g = std::get<GallerySpec>(doc.model);
    JointTable<Num> model = detail::build_gallery_model<Num>(g, doc.options.seed);
    // the declared variables must match what the gallery model produces
    const Scenario& ms = model.scenario();
    if (ms.size() != sc.size())
        throw SchemaError("declared variables do not match gallery '" + g.name + "' (expected " +
                          std::to_string(ms.size()) + " variables)");
    for (std::size_t i = 0; i < sc.size(); ++i) {
        if (sc.variable(i).name != ms.variable(i).name ||
            sc.variable(i).alphabet_size != ms.variable(i).alphabet_size)
            throw SchemaError("declared variable '" + sc.variable(i).name + "' does not match gallery '" +
                              g.name + "' (expected '" + ms.variable(i).name + "' with alphabet " +
                              std::to_string(ms.variable(i).alphabet_size) + ")");
    }
    return model;
}

} // namespace ontolab
