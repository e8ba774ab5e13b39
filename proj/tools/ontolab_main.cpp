// Command-line front door: check / trace / sweep / search / gallery over
// scenario documents, emitting deterministic CSV or markdown reports.
//
// Exit codes: 0 all checks pass (or no --assert), 1 some deviation exceeds
// the tolerance under --assert, 2 on usage or document errors.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "ontolab/ontolab.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ontolab::UsageError("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommonArgs {
    std::string backend;
    double tolerance = -1.0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool assert_mode = false;
    std::string out_format = "csv";
    std::string output_path;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--backend", args.backend, "numeric backend: exact or float")
        ->check(CLI::IsMember({"exact", "float"}));
    cmd->add_option("--tolerance", args.tolerance, "pass threshold for deviations");
    cmd->add_option("--seed", args.seed, "64-bit seed")->each([&](const std::string&) { args.seed_set = true; });
    cmd->add_flag("--assert", args.assert_mode, "exit 1 when any check fails");
    cmd->add_option("--out", args.out_format, "report format: csv or md")
        ->check(CLI::IsMember({"csv", "md"}));
    cmd->add_option("--output", args.output_path, "write the report to a file instead of stdout");
}

ontolab::RunFlags to_flags(const CommonArgs& args) {
    ontolab::RunFlags flags;
    if (!args.backend.empty()) flags.backend = ontolab::backend_from_name(args.backend);
    if (args.tolerance >= 0) flags.tolerance = args.tolerance;
    if (args.seed_set) flags.seed = args.seed;
    flags.assert_mode = args.assert_mode;
    flags.out_format = args.out_format;
    return flags;
}

int emit(const ontolab::ReportDoc& report, const CommonArgs& args) {
    std::string text = ontolab::render_report(report, args.out_format);
    if (args.output_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(args.output_path, std::ios::binary);
        if (!out) throw ontolab::UsageError("cannot write file '" + args.output_path + "'");
        out << text;
    }
    return args.assert_mode && report.any_failure ? 1 : 0;
}

ontolab::GallerySpec gallery_from_args(const std::string& name, const std::vector<std::string>& params) {
    ontolab::GallerySpec g;
    g.name = name;
    bool known = false;
    for (const auto& n : ontolab::known_gallery_names()) known = known || n == name;
    if (!known) throw ontolab::UsageError("unknown gallery model '" + name + "'");
    for (const auto& p : params) {
        auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ontolab::UsageError("--param expects key=value, got '" + p + "'");
        g.params[p.substr(0, eq)] = p.substr(eq + 1);
    }
    return g;
}

// Scenario document equivalent to `gallery --name ... --param ...`, used by
// trace when invoked without a document.
ontolab::ScenarioDoc doc_for_gallery(const ontolab::GallerySpec& g, const ontolab::RunFlags& flags) {
    ontolab::ScenarioDoc doc;
    doc.model = g;
    doc.options.backend = flags.backend.value_or(ontolab::BackendId::float_backend);
    if (flags.seed) doc.options.seed = *flags.seed;
    if (flags.tolerance) doc.options.tolerance = *flags.tolerance;
    // declare exactly the variables the gallery model produces
    auto scenario_of = [&]() {
        if (doc.options.backend == ontolab::BackendId::exact_backend)
            return ontolab::detail::build_gallery_model<ontolab::Rational>(g, doc.options.seed).scenario();
        return ontolab::detail::build_gallery_model<double>(g, doc.options.seed).scenario();
    };
    doc.variables = scenario_of().variables();
    return doc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ontolab: assumption checks, derivation traces and searches over finite ontic models"};
    app.require_subcommand(1);

    CommonArgs check_args, trace_args, sweep_args, search_args, gallery_args;
    std::string check_scenario, trace_scenario, trace_gallery, gallery_name;
    std::vector<std::string> trace_params, gallery_params;
    std::size_t sweep_n = 1000, sweep_alphabet = 2;
    std::size_t search_budget = 200000;
    double search_weight = 1000.0;
    std::string search_mode;
    bool gallery_list = false;

    auto* check = app.add_subcommand("check", "evaluate a scenario document's checks");
    check->add_option("--scenario", check_scenario, "scenario JSON document")->required();
    add_common(check, check_args);

    auto* trace = app.add_subcommand("trace", "trace the derivation steps on one model");
    trace->add_option("--scenario", trace_scenario, "scenario JSON document");
    trace->add_option("--gallery", trace_gallery, "gallery model name instead of a document");
    trace->add_option("--param", trace_params, "gallery parameter key=value (repeatable)");
    add_common(trace, trace_args);

    auto* sweep = app.add_subcommand("sweep", "random premise-model sweep certifying the implication");
    sweep->add_option("--n", sweep_n, "number of models");
    sweep->add_option("--alphabet", sweep_alphabet, "alphabet size for every variable");
    add_common(sweep, sweep_args);

    auto* search = app.add_subcommand("search", "penalized derivative-free search");
    search->add_option("--mode", search_mode, "no_st, full_premises or fr_implies_ns")->required();
    search->add_option("--budget", search_budget, "evaluation budget");
    search->add_option("--penalty-weight", search_weight, "penalty weight (default 1000)");
    add_common(search, search_args);

    auto* gallery = app.add_subcommand("gallery", "deviation profile of a gallery model");
    gallery->add_option("--name", gallery_name, "gallery model name");
    gallery->add_option("--param", gallery_params, "gallery parameter key=value (repeatable)");
    gallery->add_flag("--list", gallery_list, "list available gallery models");
    add_common(gallery, gallery_args);

    try {
        app.parse(argc, argv);

        if (check->parsed()) {
            auto doc = ontolab::parse_scenario(slurp(check_scenario));
            return emit(ontolab::run_check(doc, to_flags(check_args)), check_args);
        }
        if (trace->parsed()) {
            auto flags = to_flags(trace_args);
            ontolab::ScenarioDoc doc;
            if (!trace_scenario.empty()) {
                doc = ontolab::parse_scenario(slurp(trace_scenario));
            } else if (!trace_gallery.empty()) {
                doc = doc_for_gallery(gallery_from_args(trace_gallery, trace_params), flags);
            } else {
                throw ontolab::UsageError("trace needs --scenario or --gallery");
            }
            return emit(ontolab::run_trace(doc, flags), trace_args);
        }
        if (sweep->parsed()) {
            auto flags = to_flags(sweep_args);
            flags.n = sweep_n;
            flags.alphabet = sweep_alphabet;
            return emit(ontolab::run_sweep(flags), sweep_args);
        }
        if (search->parsed()) {
            auto flags = to_flags(search_args);
            auto mode = ontolab::search_mode_from_name(search_mode);
            if (!mode) throw ontolab::UsageError("unknown search mode '" + search_mode + "'");
            flags.mode = *mode;
            flags.budget = search_budget;
            flags.penalty_weight = search_weight;
            return emit(ontolab::run_search(flags), search_args);
        }
        if (gallery->parsed()) {
            if (gallery_list) {
                for (const auto& n : ontolab::known_gallery_names()) std::cout << n << "\n";
                return 0;
            }
            if (gallery_name.empty()) throw ontolab::UsageError("gallery needs --name or --list");
            auto spec = gallery_from_args(gallery_name, gallery_params);
            return emit(ontolab::run_gallery(spec, to_flags(gallery_args)), gallery_args);
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const ontolab::Error& e) {
        std::cerr << "ontolab: error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "ontolab: internal error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
