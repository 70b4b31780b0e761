#include "evac/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "evac/problem_io.hpp"
#include "text_util.hpp"

namespace evac {

using json = nlohmann::ordered_json;

ReportFormat parse_report_format(std::string_view text) {
    if (text == "table") return ReportFormat::table;
    if (text == "csv") return ReportFormat::csv;
    if (text == "json") return ReportFormat::json;
    throw std::invalid_argument("unknown format '" + std::string(text) + "' (table, csv, json)");
}

namespace {

json parse_or_throw(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw LoadError(std::string(what) + ": " + e.what());
    }
}

// Non-finite values (unreachable costs) are stored as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double number(const json& j) { return j.is_null() ? kUnreachable : j.get<double>(); }

// CSV cells never contain the separator.
std::string csv_text(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

json row_to_json(const ScenarioResultRow& row) {
    json j;
    j["scenario"] = row.scenario;
    j["selected"] = to_string(row.selected);
    j["attraction_vph"] = row.attraction;
    j["total_travel_time_veh_min"] = row.total_travel_time_min;
    j["total_travel_time_veh_h"] = row.total_travel_time_h;
    j["clearance_time_min"] = row.clearance_time_min;
    j["clearance_is_model_estimate"] = true;
    j["feasible"] = row.feasible;
    j["converged"] = row.converged;
    j["error"] = row.error;
    return j;
}

ScenarioResultRow row_from_json(const json& j) {
    ScenarioResultRow row;
    row.scenario = j.at("scenario").get<std::string>();
    row.selected = parse_selection(j.at("selected").get<std::string>());
    row.attraction = j.at("attraction_vph").get<std::vector<double>>();
    row.total_travel_time_min = j.at("total_travel_time_veh_min").get<double>();
    row.total_travel_time_h = j.at("total_travel_time_veh_h").get<double>();
    row.clearance_time_min = j.at("clearance_time_min").get<double>();
    row.feasible = j.at("feasible").get<bool>();
    row.converged = j.value("converged", true);
    row.error = j.value("error", std::string());
    return row;
}

std::string render_table(const std::vector<ScenarioResultRow>& rows) {
    std::size_t shelters = 0;
    std::size_t name_width = std::string("Scenario").size();
    for (const auto& r : rows) {
        shelters = std::max(shelters, r.attraction.size());
        name_width = std::max(name_width, r.scenario.size());
    }

    std::vector<std::string> header{"Scenario"};
    for (std::size_t j = 0; j < shelters; ++j) header.push_back(std::to_string(j + 1));
    header.insert(header.end(), {"Travel time (veh-min)", "Travel time (veh-h)", "Clearance (min)*"});

    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows) {
        std::vector<std::string> line{r.scenario};
        for (std::size_t j = 0; j < shelters; ++j)
            line.push_back(j < r.attraction.size() ? fixed(r.attraction[j], 0) : "");
        line.push_back(fixed(r.total_travel_time_min, 1));
        line.push_back(fixed(r.total_travel_time_h, 2));
        line.push_back(fixed(r.clearance_time_min, 0));
        cells.push_back(std::move(line));
    }

    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        width[c] = header[c].size();
        for (const auto& line : cells) width[c] = std::max(width[c], line[c].size());
    }
    width[0] = name_width;

    std::ostringstream out;
    auto emit = [&](const std::vector<std::string>& line) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            const std::string& cell = line[c];
            const std::string pad(width[c] - cell.size(), ' ');
            if (c == 0)
                out << cell << pad;
            else
                out << "  " << pad << cell;
        }
        out << '\n';
    };
    out << "Shelters' attraction rates (vph) per candidate\n";
    emit(header);
    for (const auto& line : cells) emit(line);
    out << "* clearance time is a model-defined estimate\n";
    for (const auto& r : rows) {
        if (!r.error.empty()) out << "! " << r.scenario << ": " << r.error << '\n';
        else if (!r.feasible) out << "! " << r.scenario << ": best selection violates capacity constraints\n";
        if (r.error.empty() && !r.converged) out << "! " << r.scenario << ": assignment did not converge\n";
    }
    return out.str();
}

}  // namespace

std::string rows_to_json(const std::vector<ScenarioResultRow>& rows) {
    json doc;
    doc["rows"] = json::array();
    for (const auto& r : rows) doc["rows"].push_back(row_to_json(r));
    return doc.dump(2) + "\n";
}

std::vector<ScenarioResultRow> rows_from_json(std::string_view text) {
    const json doc = parse_or_throw(text, "results");
    std::vector<ScenarioResultRow> rows;
    try {
        for (const auto& j : doc.at("rows")) rows.push_back(row_from_json(j));
    } catch (const json::exception& e) {
        throw LoadError(std::string("results: ") + e.what());
    }
    return rows;
}

std::string rows_to_csv(const std::vector<ScenarioResultRow>& rows) {
    std::size_t shelters = 0;
    for (const auto& r : rows) shelters = std::max(shelters, r.attraction.size());
    std::ostringstream out;
    out << "scenario";
    for (std::size_t j = 0; j < shelters; ++j) out << ",shelter_" << (j + 1) << "_vph";
    out << ",total_travel_time_veh_min,total_travel_time_veh_h,clearance_time_min,selected,feasible,converged,error\n";
    for (const auto& r : rows) {
        out << csv_text(r.scenario);
        for (std::size_t j = 0; j < shelters; ++j)
            out << ',' << (j < r.attraction.size() ? detail::format_double(r.attraction[j]) : "");
        out << ',' << detail::format_double(r.total_travel_time_min) << ','
            << detail::format_double(r.total_travel_time_h) << ',' << detail::format_double(r.clearance_time_min)
            << ',' << to_string(r.selected) << ',' << (r.feasible ? "true" : "false") << ','
            << (r.converged ? "true" : "false") << ',' << csv_text(r.error) << '\n';
    }
    return out.str();
}

std::vector<ScenarioResultRow> rows_from_csv(std::string_view text) {
    const auto lines = detail::content_lines(text);
    if (lines.empty()) throw LoadError("results csv: empty");
    const auto header = detail::split_fields(lines.front().second);
    if (header.size() < 8 || header.front() != "scenario") throw LoadError("results csv: unexpected header");
    const std::size_t shelters = header.size() - 8;
    std::vector<ScenarioResultRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = detail::split_fields(lines[i].second);
        const std::string where = "results csv:" + std::to_string(lines[i].first);
        if (f.size() != header.size()) throw LoadError(where + ": wrong field count");
        auto real = [&](const std::string& s) {
            auto v = detail::parse_double(s);
            if (!v) throw LoadError(where + ": '" + s + "' is not a number");
            return *v;
        };
        auto flag = [&](const std::string& s) {
            auto v = detail::parse_bool(s);
            if (!v) throw LoadError(where + ": '" + s + "' is not a boolean");
            return *v;
        };
        ScenarioResultRow row;
        row.scenario = f[0];
        for (std::size_t j = 0; j < shelters; ++j)
            if (!f[1 + j].empty()) row.attraction.push_back(real(f[1 + j]));
        row.total_travel_time_min = real(f[1 + shelters]);
        row.total_travel_time_h = real(f[2 + shelters]);
        row.clearance_time_min = real(f[3 + shelters]);
        row.selected = parse_selection(f[4 + shelters]);
        row.feasible = flag(f[5 + shelters]);
        row.converged = flag(f[6 + shelters]);
        row.error = f[7 + shelters];
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ScenarioResultRow> rows_from_text(std::string_view text) {
    const auto body = detail::trim(text);
    if (!body.empty() && body.front() == '{') return rows_from_json(text);
    return rows_from_csv(text);
}

std::string render_report(const std::vector<ScenarioResultRow>& rows, ReportFormat format) {
    if (rows.empty()) throw std::invalid_argument("render_report: no rows");
    switch (format) {
    case ReportFormat::table: return render_table(rows);
    case ReportFormat::csv: return rows_to_csv(rows);
    case ReportFormat::json: return rows_to_json(rows);
    }
    return {};
}

// -------------------------------------------------------------- assignment

namespace {

json od_to_json(const Network& network, const OdMatrix& m) {
    json j = json::object();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::object();
        for (std::size_t c = 0; c < m.cols(); ++c) row[network.nodes()[m.shelters[c]].id] = number(m.at(r, c));
        j[network.nodes()[m.origins[r]].id] = std::move(row);
    }
    return j;
}

OdMatrix od_from_json(const Network& network, const json& j) {
    std::vector<std::size_t> origins;
    std::vector<std::size_t> shelters;
    for (const auto& [origin, row] : j.items()) {
        origins.push_back(network.node_index(origin));
        if (shelters.empty())
            for (const auto& [shelter, v] : row.items()) shelters.push_back(network.node_index(shelter));
    }
    OdMatrix m(origins, shelters);
    std::size_t r = 0;
    for (const auto& [origin, row] : j.items()) {
        for (std::size_t c = 0; c < shelters.size(); ++c)
            m.at(r, c) = number(row.at(network.nodes()[shelters[c]].id));
        ++r;
    }
    return m;
}

json per_link(const Network& network, const std::vector<double>& values) {
    json j = json::object();
    for (std::size_t a = 0; a < values.size(); ++a) j[network.links()[a].id] = values[a];
    return j;
}

std::vector<double> per_link(const Network& network, const json& j) {
    std::vector<double> values(network.link_count(), 0.0);
    for (std::size_t a = 0; a < network.link_count(); ++a) values[a] = j.at(network.links()[a].id).get<double>();
    return values;
}

json assignment_json(const Network& network, const AssignmentResult& result) {
    json j;
    j["link_flows"] = per_link(network, result.link_flows);
    j["od_flows"] = od_to_json(network, result.od_flows);
    j["od_costs"] = od_to_json(network, result.od_costs);
    j["link_times"] = per_link(network, result.link_times);
    j["relative_gap"] = result.relative_gap;
    j["iterations"] = result.iterations;
    j["converged"] = result.converged;
    return j;
}

AssignmentResult assignment_from(const Network& network, const json& j) {
    AssignmentResult r;
    r.link_flows = per_link(network, j.at("link_flows"));
    r.od_flows = od_from_json(network, j.at("od_flows"));
    if (j.contains("od_costs")) r.od_costs = od_from_json(network, j.at("od_costs"));
    r.link_times = per_link(network, j.at("link_times"));
    r.relative_gap = j.at("relative_gap").get<double>();
    r.iterations = j.at("iterations").get<std::size_t>();
    r.converged = j.value("converged", false);
    return r;
}

}  // namespace

std::string assignment_to_json(const Network& network, const AssignmentResult& result) {
    return assignment_json(network, result).dump(2) + "\n";
}

AssignmentResult assignment_from_json(const Network& network, std::string_view text) {
    try {
        return assignment_from(network, parse_or_throw(text, "assignment"));
    } catch (const json::exception& e) {
        throw LoadError(std::string("assignment: ") + e.what());
    } catch (const NetworkError& e) {
        throw LoadError(std::string("assignment: ") + e.what());
    }
}

// ------------------------------------------------------------ solve report

std::string solve_report_to_json(const Network& network, const ShelterSet& shelters, const SolveReport& report) {
    json j;
    j["best_selection"] = to_string(report.best_selection);
    j["best_penalized_objective"] = report.best_penalized_objective;
    j["best_total_evacuation_time_veh_min"] = report.best_total_evacuation_time;
    j["feasible"] = report.feasible;
    json attraction = json::object();
    for (std::size_t k = 0; k < shelters.size() && k < report.shelter_attraction.size(); ++k)
        attraction[shelters.candidates[k].node_id] = report.shelter_attraction[k];
    j["shelter_attraction_vph"] = std::move(attraction);
    j["assignment"] = {{"iterations", report.assignment.iterations},
                       {"relative_gap", report.assignment.relative_gap},
                       {"converged", report.assignment.converged},
                       {"message", report.assignment.message}};
    json history = json::array();
    for (const auto& h : report.history)
        history.push_back({{"generation", h.generation},
                           {"best_fitness", h.best_fitness},
                           {"mean_fitness", h.mean_fitness},
                           {"feasible_count", h.feasible_count}});
    j["history"] = std::move(history);
    json evals = json::array();
    for (const auto& e : report.evaluations)
        evals.push_back({{"selection", to_string(e.selection)},
                         {"penalized_objective", e.penalized_objective},
                         {"total_evacuation_time_veh_min", e.total_evacuation_time},
                         {"feasible", e.feasible}});
    j["evaluations"] = std::move(evals);
    j["best_assignment"] = report.best_assignment ? assignment_json(network, *report.best_assignment) : json(nullptr);
    return j.dump(2) + "\n";
}

SolveReport solve_report_from_json(const Network& network, const ShelterSet& shelters, std::string_view text) {
    const json j = parse_or_throw(text, "solve report");
    SolveReport r;
    try {
        r.best_selection = parse_selection(j.at("best_selection").get<std::string>());
        r.best_penalized_objective = j.at("best_penalized_objective").get<double>();
        r.best_total_evacuation_time = j.at("best_total_evacuation_time_veh_min").get<double>();
        r.feasible = j.at("feasible").get<bool>();
        const auto& attraction = j.at("shelter_attraction_vph");
        for (const auto& s : shelters.candidates) r.shelter_attraction.push_back(attraction.at(s.node_id).get<double>());
        const auto& a = j.at("assignment");
        r.assignment = {a.at("iterations").get<std::size_t>(), a.at("relative_gap").get<double>(),
                        a.at("converged").get<bool>(), a.at("message").get<std::string>()};
        for (const auto& h : j.at("history"))
            r.history.push_back({h.at("generation").get<std::size_t>(), h.at("best_fitness").get<double>(),
                                 h.at("mean_fitness").get<double>(), h.at("feasible_count").get<std::size_t>()});
        for (const auto& e : j.at("evaluations"))
            r.evaluations.push_back({parse_selection(e.at("selection").get<std::string>()),
                                     e.at("penalized_objective").get<double>(),
                                     e.at("total_evacuation_time_veh_min").get<double>(), e.at("feasible").get<bool>()});
        if (!j.at("best_assignment").is_null())
            r.best_assignment = std::make_shared<const AssignmentResult>(assignment_from(network, j.at("best_assignment")));
    } catch (const json::exception& e) {
        throw LoadError(std::string("solve report: ") + e.what());
    }
    return r;
}

std::string history_to_csv(const std::vector<GenerationStats>& history) {
    std::ostringstream out;
    out << "generation,best_fitness,mean_fitness,feasible_count\n";
    for (const auto& h : history)
        out << h.generation << ',' << detail::format_double(h.best_fitness) << ','
            << detail::format_double(h.mean_fitness) << ',' << h.feasible_count << '\n';
    return out.str();
}

std::vector<GenerationStats> history_from_csv(std::string_view text) {
    const auto lines = detail::content_lines(text);
    std::vector<GenerationStats> history;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = detail::split_fields(lines[i].second);
        auto generation = f.size() == 4 ? detail::parse_unsigned(f[0]) : std::nullopt;
        auto best = f.size() == 4 ? detail::parse_double(f[1]) : std::nullopt;
        auto mean = f.size() == 4 ? detail::parse_double(f[2]) : std::nullopt;
        auto feasible = f.size() == 4 ? detail::parse_unsigned(f[3]) : std::nullopt;
        if (!generation || !best || !mean || !feasible)
            throw LoadError("history csv:" + std::to_string(lines[i].first) + ": malformed row");
        history.push_back({static_cast<std::size_t>(*generation), *best, *mean, static_cast<std::size_t>(*feasible)});
    }
    return history;
}

// -------------------------------------------------------------- enumeration

std::string enumeration_to_json(const EnumerationReport& report) {
    json j;
    j["best"] = report.best;
    json evals = json::array();
    for (const auto& e : report.evaluations)
        evals.push_back({{"selection", to_string(e.selection)},
                         {"penalized_objective", e.penalized_objective},
                         {"feasible", e.feasible},
                         {"total_evacuation_time_veh_min", e.total_evacuation_time}});
    j["evaluations"] = std::move(evals);
    return j.dump(2) + "\n";
}

EnumerationReport enumeration_from_json(std::string_view text) {
    const json j = parse_or_throw(text, "enumeration");
    EnumerationReport r;
    try {
        r.best = j.at("best").get<std::size_t>();
        for (const auto& e : j.at("evaluations"))
            r.evaluations.push_back({parse_selection(e.at("selection").get<std::string>()),
                                     e.at("penalized_objective").get<double>(), e.at("feasible").get<bool>(),
                                     e.at("total_evacuation_time_veh_min").get<double>()});
    } catch (const json::exception& e) {
        throw LoadError(std::string("enumeration: ") + e.what());
    }
    if (r.best >= r.evaluations.size()) throw LoadError("enumeration: best index out of range");
    return r;
}

std::string enumeration_to_csv(const EnumerationReport& report) {
    std::ostringstream out;
    out << "selection,penalized_objective,feasible,total_evacuation_time_veh_min,best\n";
    for (std::size_t k = 0; k < report.evaluations.size(); ++k) {
        const auto& e = report.evaluations[k];
        out << to_string(e.selection) << ',' << detail::format_double(e.penalized_objective) << ','
            << (e.feasible ? "true" : "false") << ',' << detail::format_double(e.total_evacuation_time) << ','
            << (k == report.best ? 1 : 0) << '\n';
    }
    return out.str();
}

EnumerationReport enumeration_from_csv(std::string_view text) {
    const auto lines = detail::content_lines(text);
    EnumerationReport r;
    bool have_best = false;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = detail::split_fields(lines[i].second);
        const std::string where = "enumeration csv:" + std::to_string(lines[i].first);
        if (f.size() != 5) throw LoadError(where + ": expected 5 fields");
        auto objective = detail::parse_double(f[1]);
        auto feasible = detail::parse_bool(f[2]);
        auto time = detail::parse_double(f[3]);
        if (!objective || !feasible || !time) throw LoadError(where + ": malformed row");
        r.evaluations.push_back({parse_selection(f[0]), *objective, *feasible, *time});
        if (f[4] == "1") {
            r.best = r.evaluations.size() - 1;
            have_best = true;
        }
    }
    if (!have_best) throw LoadError("enumeration csv: no row is marked best");
    return r;
}

}  // namespace evac
