#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "ontolab/scenario_doc.hpp"
#include "ontolab/theorem.hpp"
#include "ontolab/version.hpp"

namespace ontolab {

// Deterministic tabular report: run metadata plus one row per check.
// Rendering the same report twice yields byte-identical output.
struct ReportDoc {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> header{"check", "deviation", "witness", "vacuous_events", "result"};
    std::vector<std::vector<std::string>> rows;
    bool any_failure = false;
};

// CSV dialect: comma separator, '.' decimal point, LF line endings, header
// row always; metadata lines lead with "# ". Floats carry 12 significant
// digits; exact deviations print as reduced fractions.
inline std::string render_csv(const ReportDoc& doc) {
    std::string out;
    for (const auto& [k, v] : doc.metadata) out += "# " + k + "," + v + "\n";
    for (std::size_t i = 0; i < doc.header.size(); ++i) out += (i ? "," : "") + doc.header[i];
    out += "\n";
    for (const auto& row : doc.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
        out += "\n";
    }
    return out;
}

inline std::string render_markdown(const ReportDoc& doc) {
    std::string out = "# ontolab report\n\n";
    for (const auto& [k, v] : doc.metadata) out += "- " + k + ": " + v + "\n";
    out += "\n|";
    for (const auto& h : doc.header) out += " " + h + " |";
    out += "\n|";
    for (std::size_t i = 0; i < doc.header.size(); ++i) out += " --- |";
    out += "\n";
    for (const auto& row : doc.rows) {
        out += "|";
        for (const auto& cell : row) out += " " + (cell.empty() ? std::string("-") : cell) + " |";
        out += "\n";
    }
    return out;
}

inline std::string render_report(const ReportDoc& doc, const std::string& format) {
    if (format == "csv") return render_csv(doc);
    if (format == "md") return render_markdown(doc);
    throw UsageError("unknown output format '" + format + "' (expected csv or md)");
}

// ---------------------------------------------------------------------------
// command runners
// ---------------------------------------------------------------------------

struct RunFlags {
    std::optional<BackendId> backend; // overrides the document
    std::optional<double> tolerance;
    std::optional<std::uint64_t> seed;
    std::string out_format = "csv";
    bool assert_mode = false;

    // sweep
    std::size_t n = 1000;
    std::size_t alphabet = 2;

    // search
    std::optional<SearchMode> mode;
    std::size_t budget = 200000;
    double penalty_weight = 1000.0;
};

namespace detail {

struct Effective {
    BackendId backend;
    double tolerance;
    std::uint64_t seed;
};

inline Effective effective_options(const ScenarioDoc* doc, const RunFlags& flags) {
    Effective e;
    e.backend = flags.backend ? *flags.backend
                              : (doc ? doc->options.backend : BackendId::float_backend);
    if (flags.tolerance)
        e.tolerance = *flags.tolerance;
    else if (doc && doc->options.tolerance)
        e.tolerance = *doc->options.tolerance;
    else
        e.tolerance = e.backend == BackendId::exact_backend ? 0.0 : kDefaultFloatTolerance;
    e.seed = flags.seed ? *flags.seed : (doc ? doc->options.seed : 0);
    return e;
}

inline void common_metadata(ReportDoc& rep, const char* command, const Effective& e) {
    rep.metadata.emplace_back("ontolab", kVersion);
    rep.metadata.emplace_back("command", command);
    rep.metadata.emplace_back("backend", backend_id_name(e.backend));
    rep.metadata.emplace_back("tolerance", format_double(e.tolerance));
    rep.metadata.emplace_back("seed", std::to_string(e.seed));
}

template <class Num>
bool within_tolerance(const Num& deviation, double tolerance) {
    return deviation <= Num(numeric_traits<Num>::from_double(tolerance));
}

template <class Num>
void violation_row(ReportDoc& rep, const Scenario& sc, const ViolationReport<Num>& v, double tolerance) {
    bool pass = within_tolerance(v.deviation, tolerance);
    rep.rows.push_back({v.label, format_number(v.deviation),
                        v.witness ? format_assignment(sc, *v.witness) : std::string{},
                        std::to_string(v.vacuous_events), pass ? "pass" : "fail"});
    if (!pass) rep.any_failure = true;
    if (v.degenerate) rep.metadata.emplace_back("warning", "degenerate model: " + v.label +
                                                               " conditions mostly on zero-mass events");
}

template <class Num>
ReportDoc run_check_impl(const ScenarioDoc& doc, const Effective& e) {
    ReportDoc rep;
    common_metadata(rep, "check", e);
    JointTable<Num> model = build_model<Num>(doc);
    Scenario sc = model.scenario();
    for (const auto& check : doc.checks) {
        if (const auto* id = std::get_if<AssumptionId>(&check))
            violation_row(rep, sc, assumption_deviation(model, *id), e.tolerance);
        else
            violation_row(rep, sc, ci_deviation(model, std::get<CIQuery>(check)), e.tolerance);
    }
    return rep;
}

template <class Num>
ReportDoc run_trace_impl(const ScenarioDoc& doc, const Effective& e) {
    ReportDoc rep;
    common_metadata(rep, "trace", e);
    JointTable<Num> model = build_model<Num>(doc);
    Scenario sc = model.scenario();
    DerivationTrace<Num> tr = derivation_trace(model);
    auto row = [&](const char* step, const Num& residual, const std::optional<Assignment>& witness) {
        bool pass = within_tolerance(residual, e.tolerance);
        rep.rows.push_back({step, format_number(residual),
                            witness ? format_assignment(sc, *witness) : std::string{},
                            std::to_string(tr.vacuous_events), pass ? "pass" : "fail"});
        if (!pass) rep.any_failure = true;
    };
    row("chain_rule", tr.residual_chain_rule, std::nullopt);
    row("st_step", tr.residual_st_step, tr.witness_st_step);
    row("ns_frprime_step", tr.residual_ns_frprime_step, tr.witness_ns_frprime_step);
    row("conclusion", tr.residual_conclusion, tr.witness_conclusion);
    return rep;
}

template <class Num>
ReportDoc run_sweep_impl(const RunFlags& flags, const Effective& e) {
    ReportDoc rep;
    common_metadata(rep, "sweep", e);
    rep.metadata.emplace_back("n", std::to_string(flags.n));
    rep.metadata.emplace_back("alphabet", std::to_string(flags.alphabet));
    auto sizes = PremiseSizes::uniform(flags.alphabet);
    SweepReport<Num> sw = verify_implication_sweep<Num>(flags.n, sizes, e.seed);
    rep.metadata.emplace_back("certified_models", std::to_string(sw.certified_models));
    bool pass = within_tolerance(sw.max_fr_deviation, e.tolerance);
    rep.rows.push_back({"sweep[max_FR]", format_number(sw.max_fr_deviation),
                        "seed=" + std::to_string(sw.argmax_seed), "0", pass ? "pass" : "fail"});
    if (!pass) rep.any_failure = true;
    for (const auto& [q, dev] : sw.quantiles) {
        bool qpass = within_tolerance(dev, e.tolerance);
        rep.rows.push_back({"sweep[q" + format_double(q * 100) + "_FR]", format_number(dev), "", "0",
                            qpass ? "pass" : "fail"});
        if (!qpass) rep.any_failure = true;
    }
    return rep;
}

} // namespace detail

inline ReportDoc run_check(const ScenarioDoc& doc, const RunFlags& flags) {
    auto e = detail::effective_options(&doc, flags);
    return e.backend == BackendId::exact_backend ? detail::run_check_impl<Rational>(doc, e)
                                                 : detail::run_check_impl<double>(doc, e);
}

inline ReportDoc run_trace(const ScenarioDoc& doc, const RunFlags& flags) {
    auto e = detail::effective_options(&doc, flags);
    return e.backend == BackendId::exact_backend ? detail::run_trace_impl<Rational>(doc, e)
                                                 : detail::run_trace_impl<double>(doc, e);
}

inline ReportDoc run_sweep(const RunFlags& flags) {
    auto e = detail::effective_options(nullptr, flags);
    return e.backend == BackendId::exact_backend ? detail::run_sweep_impl<Rational>(flags, e)
                                                 : detail::run_sweep_impl<double>(flags, e);
}

inline ReportDoc run_search(const RunFlags& flags) {
    if (!flags.mode) throw UsageError("search requires --mode {no_st|full_premises|fr_implies_ns}");
    auto e = detail::effective_options(nullptr, flags);
    if (e.backend == BackendId::exact_backend)
        throw UsageError("search runs on the float backend");
    ReportDoc rep;
    detail::common_metadata(rep, "search", e);
    rep.metadata.emplace_back("mode", search_mode_name(*flags.mode));
    rep.metadata.emplace_back("budget", std::to_string(flags.budget));
    rep.metadata.emplace_back("penalty_weight", format_double(flags.penalty_weight));
    SearchResult res = penalized_search(*flags.mode, flags.budget, flags.penalty_weight, e.seed);
    rep.metadata.emplace_back("evaluations_used", std::to_string(res.evaluations_used));
    rep.rows.push_back({"search[objective]", format_double(res.objective_value), "", "0", "-"});
    const Scenario& sc = res.best_model.scenario();
    for (auto id : {AssumptionId::FR, AssumptionId::FRprime, AssumptionId::NS, AssumptionId::ST,
                    AssumptionId::FACT})
        detail::violation_row(rep, sc, assumption_deviation(res.best_model, id), e.tolerance);
    return rep;
}

// Deviation profile of one gallery model, plus its CHSH value when the
// scenario has binary A, B, X and Y.
inline ReportDoc run_gallery(const GallerySpec& gallery, const RunFlags& flags) {
    auto e = detail::effective_options(nullptr, flags);
    ReportDoc rep;
    detail::common_metadata(rep, "gallery", e);
    rep.metadata.emplace_back("model", gallery.name);
    for (const auto& [k, v] : gallery.params) rep.metadata.emplace_back("param." + k, v);

    auto profile = [&](const auto& model) {
        const Scenario& sc = model.scenario();
        for (auto id : {AssumptionId::FR, AssumptionId::FRprime, AssumptionId::NS, AssumptionId::ST,
                        AssumptionId::FACT}) {
            bool applicable = true;
            for (const auto& comp : assumption_components(id))
                for (const auto& lists : {comp.target, comp.varying, comp.spectator})
                    for (const auto& v : lists) applicable = applicable && sc.has(v);
            if (!applicable) continue;
            detail::violation_row(rep, sc, assumption_deviation(model, id), e.tolerance);
        }
        bool chsh_shape = sc.has("A") && sc.has("B") && sc.has("X") && sc.has("Y");
        for (const char* v : {"A", "B", "X", "Y"})
            chsh_shape = chsh_shape && sc.has(v) && sc.variable(sc.index_of(v)).alphabet_size == 2;
        if (chsh_shape) {
            std::vector<std::string> xy = {"X", "Y"};
            using NumT = typename std::decay_t<decltype(model)>::value_type;
            auto kernel_row = [&](std::size_t a, std::size_t b) {
                auto t = model.condition(xy, {{"A", a}, {"B", b}});
                return std::vector<NumT>(t.probabilities());
            };
            std::vector<std::vector<NumT>> rows;
            for (std::size_t a = 0; a < 2; ++a)
                for (std::size_t b = 0; b < 2; ++b) rows.push_back(kernel_row(a, b));
            auto kernel = ConditionalKernel<NumT>::from_rows({"X", "Y"}, {"A", "B"}, {2, 2}, {2, 2},
                                                             std::move(rows));
            rep.rows.push_back({"chsh", format_number(chsh_value(kernel)), "", "0", "-"});
        }
    };

    if (e.backend == BackendId::exact_backend)
        profile(detail::build_gallery_model<Rational>(gallery, e.seed));
    else
        profile(detail::build_gallery_model<double>(gallery, e.seed));
    return rep;
}

} // namespace ontolab
