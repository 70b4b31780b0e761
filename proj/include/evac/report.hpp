#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "evac/assignment.hpp"
#include "evac/enumeration.hpp"
#include "evac/ga.hpp"
#include "evac/scenarios.hpp"

namespace evac {

enum class ReportFormat { table, csv, json };

ReportFormat parse_report_format(std::string_view text);

/// Scenario rows as a fixed-width table (one attraction column per
/// candidate, travel time in veh-min and veh-h, clearance estimate), CSV, or
/// the canonical JSON document. Throws std::invalid_argument on no rows.
std::string render_report(const std::vector<ScenarioResultRow>& rows, ReportFormat format);

std::string rows_to_json(const std::vector<ScenarioResultRow>& rows);
std::vector<ScenarioResultRow> rows_from_json(std::string_view text);
std::string rows_to_csv(const std::vector<ScenarioResultRow>& rows);
std::vector<ScenarioResultRow> rows_from_csv(std::string_view text);
/// Detects JSON vs CSV by the first non-blank character.
std::vector<ScenarioResultRow> rows_from_text(std::string_view text);

std::string assignment_to_json(const Network& network, const AssignmentResult& result);
/// Trees are not serialized; the parsed result has none.
AssignmentResult assignment_from_json(const Network& network, std::string_view text);

std::string solve_report_to_json(const Network& network, const ShelterSet& shelters, const SolveReport& report);
SolveReport solve_report_from_json(const Network& network, const ShelterSet& shelters, std::string_view text);

std::string history_to_csv(const std::vector<GenerationStats>& history);
std::vector<GenerationStats> history_from_csv(std::string_view text);

std::string enumeration_to_json(const EnumerationReport& report);
EnumerationReport enumeration_from_json(std::string_view text);
std::string enumeration_to_csv(const EnumerationReport& report);
EnumerationReport enumeration_from_csv(std::string_view text);

}  // namespace evac
