#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "evac/assignment.hpp"
#include "evac/ga.hpp"
#include "evac/network.hpp"

namespace evac {

/// Malformed input: unreadable file, bad syntax, bad value. The message
/// carries file and line where known.
class LoadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input parsed but failed cross-reference or invariant checks.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(ValidationReport report);
    const ValidationReport& report() const { return report_; }

private:
    ValidationReport report_;
};

struct SolverSettings {
    ImpedanceParameter impedance{10.0};
    PenaltyConfig penalties;
    GAConfig ga;
    AssignmentConfig assignment;
    double free_flow_speed_mph = kDefaultFreeFlowSpeedMph;
};

/// Flat `section.key = value` text; `#` starts a comment. Missing keys keep
/// their defaults. Throws LoadError naming the line of an unknown key or a
/// bad value.
SolverSettings parse_settings(std::string_view text, const std::string& source = "<config>");
SolverSettings load_settings(const std::filesystem::path& path);
std::string format_settings(const SolverSettings& settings);

struct NetworkData {
    Network network;
    std::optional<ShelterSet> shelters;                  // present in JSON bundles
    std::vector<DemandScenario> scenarios;               // present in JSON bundles
    std::vector<std::string> warnings;
};

/// `path` is either a directory holding nodes.csv and links.csv, or a JSON
/// document with "nodes" and "links" (and optionally "shelters", "scenarios").
NetworkData load_network(const std::filesystem::path& path,
                         double free_flow_speed_mph = kDefaultFreeFlowSpeedMph);
NetworkData parse_network_csv(std::string_view nodes_csv, std::string_view links_csv,
                              double free_flow_speed_mph = kDefaultFreeFlowSpeedMph,
                              const std::string& source = "<network>");

ShelterSet parse_shelters_csv(std::string_view text, const std::string& source = "<shelters>");
ShelterSet load_shelters(const std::filesystem::path& path);

/// A scenario document is {name, productions: {origin: vehicles}} or an
/// array of them.
std::vector<DemandScenario> parse_scenarios_json(std::string_view text, const std::string& source = "<scenario>");
std::vector<DemandScenario> load_scenarios(const std::filesystem::path& path);

struct ProblemBundle {
    Network network;
    ShelterSet shelters;
    std::vector<DemandScenario> scenarios;
    ImpedanceParameter impedance{10.0};
    PenaltyConfig penalties;
    GAConfig ga;
    AssignmentConfig assignment;
    std::vector<std::string> warnings;

    BilevelProblem problem(std::size_t scenario) const {
        return {network, shelters, scenarios.at(scenario), impedance, penalties, assignment};
    }
};

struct ProblemPaths {
    std::filesystem::path network;
    std::filesystem::path shelters;  // may be empty for a JSON bundle carrying shelters
    std::vector<std::filesystem::path> scenarios;
    std::filesystem::path config;    // may be empty: all defaults
};

/// Loads, defaults and validates a full problem. Throws LoadError on parse
/// problems and ValidationError on invariant violations.
ProblemBundle load_problem(const ProblemPaths& paths);

/// Checks a bundle's cross references (network, shelters, scenarios).
ValidationReport validate_bundle(const Network& network, const ShelterSet& shelters,
                                 const std::vector<DemandScenario>& scenarios);

std::string read_text_file(const std::filesystem::path& path);
/// Writes to a sibling temporary and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace evac
