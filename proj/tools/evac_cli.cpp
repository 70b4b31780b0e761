// Command-line front end: validate, assign, solve, enumerate, run, report.
//
// Exit codes: 0 success, 1 validation or input failure, 2 solve failure.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evac/assignment.hpp"
#include "evac/enumeration.hpp"
#include "evac/ga.hpp"
#include "evac/problem_io.hpp"
#include "evac/report.hpp"
#include "evac/scenarios.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitSolve = 2;

struct CommonOptions {
    std::string network;
    std::string shelters;
    std::vector<std::string> scenarios;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "json";
    std::string scenario_name;
};

void add_problem_options(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--network", o.network, "network directory (nodes.csv, links.csv) or JSON document")
        ->required();
    cmd->add_option("--shelters", o.shelters, "shelters CSV (node_id,capacity_vph)");
    cmd->add_option("--scenario", o.scenarios, "scenario JSON file (repeatable)");
    cmd->add_option("--config", o.config, "key = value configuration file");
    cmd->add_option("--out", o.out, "write the result here instead of stdout");
}

evac::ProblemBundle load(const CommonOptions& o) {
    evac::ProblemPaths paths;
    paths.network = o.network;
    paths.shelters = o.shelters;
    for (const auto& s : o.scenarios) paths.scenarios.emplace_back(s);
    paths.config = o.config;
    auto bundle = evac::load_problem(paths);
    for (const auto& w : bundle.warnings) std::cerr << "warning: " << w << '\n';
    return bundle;
}

std::size_t pick_scenario(const evac::ProblemBundle& bundle, const std::string& name) {
    if (name.empty()) return 0;
    for (std::size_t s = 0; s < bundle.scenarios.size(); ++s)
        if (bundle.scenarios[s].name == name) return s;
    throw evac::LoadError("no scenario named '" + name + "'");
}

void emit(const CommonOptions& o, const std::string& text) {
    if (o.out.empty())
        std::cout << text;
    else
        evac::write_file_atomic(o.out, text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shelter location-allocation solver for evacuation planning"};
    app.require_subcommand(1);
    CommonOptions o;

    auto* validate = app.add_subcommand("validate", "check network, shelters and scenarios");
    add_problem_options(validate, o);

    auto* assign = app.add_subcommand("assign", "lower-level assignment for a fixed shelter selection");
    add_problem_options(assign, o);
    std::string selection_bits;
    assign->add_option("--selection", selection_bits, "open shelters as a bit string, e.g. 01101 (default all)");
    assign->add_option("--scenario-name", o.scenario_name, "scenario to use (default: first)");

    auto* solve = app.add_subcommand("solve", "bi-level GA solve of one scenario");
    add_problem_options(solve, o);
    solve->add_option("--seed", o.seed, "GA seed (overrides ga.rng_seed)");
    solve->add_option("--scenario-name", o.scenario_name, "scenario to use (default: first)");
    std::string history_csv;
    solve->add_option("--history-csv", history_csv, "also write per-generation history as CSV");

    auto* enumerate = app.add_subcommand("enumerate", "exhaustive oracle over all shelter subsets");
    add_problem_options(enumerate, o);
    enumerate->add_option("--scenario-name", o.scenario_name, "scenario to use (default: first)");
    enumerate->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    auto* run = app.add_subcommand("run", "bi-level solve of every scenario");
    add_problem_options(run, o);
    run->add_option("--seed", o.seed, "GA seed (overrides ga.rng_seed)");
    run->add_option("--format", o.format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
    bool parallel_scenarios = false;
    run->add_flag("--parallel", parallel_scenarios, "solve scenarios concurrently");

    auto* report = app.add_subcommand("report", "re-render stored scenario results");
    std::string in_path;
    report->add_option("--in", in_path, "results file written by 'run' (JSON or CSV)")->required();
    report->add_option("--format", o.format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
    report->add_option("--out", o.out, "write here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*report) {
            const auto rows = evac::rows_from_text(evac::read_text_file(in_path));
            emit(o, evac::render_report(rows, evac::parse_report_format(o.format)));
            return kExitOk;
        }

        const evac::ProblemBundle bundle = load(o);

        if (*validate) {
            std::cout << "ok: " << bundle.network.node_count() << " nodes, " << bundle.network.link_count()
                      << " links, " << bundle.shelters.size() << " candidate shelters, " << bundle.scenarios.size()
                      << " scenario(s)\n";
            return kExitOk;
        }

        try {
            if (*assign) {
                const std::size_t s = pick_scenario(bundle, o.scenario_name);
                const evac::Selection selection = selection_bits.empty()
                                                      ? evac::Selection(bundle.shelters.size(), true)
                                                      : evac::parse_selection(selection_bits);
                const auto open = evac::open_shelter_nodes(bundle.network, bundle.shelters, selection);
                const auto result = evac::solve_lower_level(bundle.network, open, bundle.scenarios[s],
                                                            bundle.impedance, bundle.assignment);
                const auto clearance =
                    evac::clearance_time(result, bundle.network, bundle.shelters, bundle.scenarios[s]);
                std::cerr << "total travel time " << evac::total_evacuation_time(bundle.network, result)
                          << " veh-min, clearance estimate " << clearance.minutes << " min, gap "
                          << result.relative_gap << " after " << result.iterations << " iterations\n";
                emit(o, evac::assignment_to_json(bundle.network, result));
                return result.converged ? kExitOk : kExitSolve;
            }
            if (*solve) {
                const std::size_t s = pick_scenario(bundle, o.scenario_name);
                const auto outcome = evac::solve_scenario(bundle, s, o.seed.value_or(bundle.ga.rng_seed));
                emit(o, evac::solve_report_to_json(bundle.network, bundle.shelters, outcome.report));
                if (!history_csv.empty())
                    evac::write_file_atomic(history_csv, evac::history_to_csv(outcome.report.history));
                std::cerr << "best " << evac::to_string(outcome.report.best_selection) << " objective "
                          << outcome.report.best_penalized_objective
                          << (outcome.report.feasible ? " (feasible)\n" : " (infeasible)\n");
                return outcome.report.best_assignment ? kExitOk : kExitSolve;
            }
            if (*enumerate) {
                const std::size_t s = pick_scenario(bundle, o.scenario_name);
                const auto result = evac::exhaustive_solve(bundle.problem(s), bundle.ga.parallel_evaluation,
                                                           bundle.ga.threads);
                emit(o, o.format == "csv" ? evac::enumeration_to_csv(result) : evac::enumeration_to_json(result));
                std::cerr << "best " << evac::to_string(result.best_entry().selection) << " objective "
                          << result.best_entry().penalized_objective << '\n';
                return kExitOk;
            }
            if (*run) {
                const auto rows = evac::run_scenarios(bundle, o.seed.value_or(bundle.ga.rng_seed),
                                                      parallel_scenarios);
                const std::string format = o.format;
                emit(o, evac::render_report(rows, evac::parse_report_format(format)));
                bool all_ok = true;
                for (const auto& r : rows) all_ok = all_ok && r.error.empty();
                return all_ok ? kExitOk : kExitSolve;
            }
        } catch (const evac::LoadError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitInvalid;
        } catch (const std::exception& e) {
            std::cerr << "solve failed: " << e.what() << '\n';
            return kExitSolve;
        }
    } catch (const evac::ValidationError& e) {
        std::cerr << e.what();
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitOk;
}
