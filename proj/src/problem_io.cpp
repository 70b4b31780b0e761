#include "evac/problem_io.hpp"

#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "text_util.hpp"

namespace evac {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

ValidationError::ValidationError(ValidationReport report)
    : std::runtime_error("validation failed:\n" + report.to_text()), report_(std::move(report)) {}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
    std::random_device entropy;
    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(entropy());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename onto '" + path.string() + "': " + ec.message());
    }
}

// ---------------------------------------------------------------- settings

namespace {

[[noreturn]] void bad_line(const std::string& source, std::size_t line, const std::string& msg) {
    throw LoadError(source + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

SolverSettings parse_settings(std::string_view text, const std::string& source) {
    SolverSettings s;
    double beta = s.impedance.value();
    for (const auto& [number, line] : detail::content_lines(text)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) bad_line(source, number, "expected 'key = value'");
        const std::string key(detail::trim(std::string_view(line).substr(0, eq)));
        std::string value(detail::trim(std::string_view(line).substr(eq + 1)));
        if (auto hash = value.find('#'); hash != std::string::npos) value = detail::trim(value.substr(0, hash));

        auto real = [&] {
            auto v = detail::parse_double(value);
            if (!v || !std::isfinite(*v)) bad_line(source, number, "'" + key + "' expects a number");
            return *v;
        };
        auto count = [&] {
            auto v = detail::parse_unsigned(value);
            if (!v) bad_line(source, number, "'" + key + "' expects a non-negative integer");
            return static_cast<std::size_t>(*v);
        };
        auto flag = [&] {
            auto v = detail::parse_bool(value);
            if (!v) bad_line(source, number, "'" + key + "' expects true/false");
            return *v;
        };

        try {
            if (key == "impedance.beta") beta = real();
            else if (key == "penalty.alpha_shelter") s.penalties.alpha_shelter = real();
            else if (key == "penalty.beta_link") s.penalties.beta_link = real();
            else if (key == "ga.population_size") s.ga.population_size = count();
            else if (key == "ga.max_generations") s.ga.max_generations = count();
            else if (key == "ga.reproduction_rate") s.ga.reproduction_rate = real();
            else if (key == "ga.mutation_probability") s.ga.mutation_probability = real();
            else if (key == "ga.rng_seed") s.ga.rng_seed = count();
            else if (key == "ga.elitism_count") s.ga.elitism_count = count();
            else if (key == "ga.mutation_mode") s.ga.mutation_mode = parse_mutation_mode(value);
            else if (key == "ga.parallel_evaluation") s.ga.parallel_evaluation = flag();
            else if (key == "ga.cache_fitness") s.ga.cache_fitness = flag();
            else if (key == "ga.threads") s.ga.threads = count();
            else if (key == "assignment.max_iterations") s.assignment.max_iterations = count();
            else if (key == "assignment.gap_tolerance") s.assignment.gap_tolerance = real();
            else if (key == "assignment.step_rule") s.assignment.step_rule = parse_step_rule(value);
            else if (key == "assignment.record_trees") s.assignment.record_trees = flag();
            else if (key == "network.free_flow_speed_mph") s.free_flow_speed_mph = real();
            else bad_line(source, number, "unknown key '" + key + "'");
        } catch (const std::invalid_argument& e) {
            bad_line(source, number, e.what());
        }
    }
    try {
        s.impedance = ImpedanceParameter(beta);
        s.penalties.validate();
        s.ga.validate();
        s.assignment.validate();
        if (!(s.free_flow_speed_mph > 0.0)) throw std::invalid_argument("network.free_flow_speed_mph must be positive");
    } catch (const std::invalid_argument& e) {
        throw LoadError(source + ": " + e.what());
    }
    return s;
}

SolverSettings load_settings(const fs::path& path) { return parse_settings(read_text_file(path), path.string()); }

std::string format_settings(const SolverSettings& s) {
    std::ostringstream out;
    auto real = [](double v) { return detail::format_double(v); };
    out << "impedance.beta = " << real(s.impedance.value()) << '\n'
        << "penalty.alpha_shelter = " << real(s.penalties.alpha_shelter) << '\n'
        << "penalty.beta_link = " << real(s.penalties.beta_link) << '\n'
        << "ga.population_size = " << s.ga.population_size << '\n'
        << "ga.max_generations = " << s.ga.max_generations << '\n'
        << "ga.reproduction_rate = " << real(s.ga.reproduction_rate) << '\n'
        << "ga.mutation_probability = " << real(s.ga.mutation_probability) << '\n'
        << "ga.rng_seed = " << s.ga.rng_seed << '\n'
        << "ga.elitism_count = " << s.ga.elitism_count << '\n'
        << "ga.mutation_mode = " << to_string(s.ga.mutation_mode) << '\n'
        << "ga.parallel_evaluation = " << (s.ga.parallel_evaluation ? "true" : "false") << '\n'
        << "ga.cache_fitness = " << (s.ga.cache_fitness ? "true" : "false") << '\n'
        << "ga.threads = " << s.ga.threads << '\n'
        << "assignment.max_iterations = " << s.assignment.max_iterations << '\n'
        << "assignment.gap_tolerance = " << real(s.assignment.gap_tolerance) << '\n'
        << "assignment.step_rule = " << to_string(s.assignment.step_rule) << '\n'
        << "assignment.record_trees = " << (s.assignment.record_trees ? "true" : "false") << '\n'
        << "network.free_flow_speed_mph = " << real(s.free_flow_speed_mph) << '\n';
    return out.str();
}

// ----------------------------------------------------------------- network

namespace {

/// CSV table with a header row; values looked up by column name.
struct CsvTable {
    std::string source;
    std::vector<std::string> header;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;

    std::optional<std::size_t> column(std::string_view name) const {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (header[c] == name) return c;
        return std::nullopt;
    }
    std::size_t require(std::string_view name) const {
        auto c = column(name);
        if (!c) throw LoadError(source + ": missing column '" + std::string(name) + "'");
        return *c;
    }
};

CsvTable parse_csv(std::string_view text, const std::string& source) {
    CsvTable table;
    table.source = source;
    auto lines = detail::content_lines(text);
    if (lines.empty()) throw LoadError(source + ": empty file");
    table.header = detail::split_fields(lines.front().second);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto fields = detail::split_fields(lines[i].second);
        if (fields.size() != table.header.size())
            bad_line(source, lines[i].first,
                     "expected " + std::to_string(table.header.size()) + " fields, got " +
                         std::to_string(fields.size()));
        table.rows.emplace_back(lines[i].first, std::move(fields));
    }
    return table;
}

double number_field(const CsvTable& t, std::size_t line, const std::string& field, std::string_view name) {
    auto v = detail::parse_double(field);
    if (!v) bad_line(t.source, line, "column '" + std::string(name) + "': '" + field + "' is not a number");
    return *v;
}

Link make_link(std::string id, std::string from, std::string to, double capacity, std::optional<double> free_flow,
               std::optional<double> length, std::optional<double> saturation, double speed,
               std::vector<std::string>& warnings, const std::string& where) {
    Link link{std::move(id), std::move(from), std::move(to), capacity, 0.0, saturation.value_or(1.0)};
    if (free_flow) {
        link.free_flow_time = *free_flow;
        if (length) warnings.push_back(where + ": link '" + link.id +
                                       "' gives both free_flow_min and length_mi; using free_flow_min");
    } else if (length) {
        try {
            link.free_flow_time = free_flow_time_from_length(*length, speed);
        } catch (const std::invalid_argument& e) {
            throw LoadError(where + ": link '" + link.id + "': " + e.what());
        }
    } else {
        throw LoadError(where + ": link '" + link.id + "' needs free_flow_min or length_mi");
    }
    return link;
}

ShelterSet shelters_from_json(const json& doc, const std::string& source) {
    ShelterSet set;
    for (const auto& s : doc) {
        if (!s.contains("node_id") || !s.contains("capacity_vph"))
            throw LoadError(source + ": shelter entries need node_id and capacity_vph");
        set.candidates.push_back({s.at("node_id").get<std::string>(), s.at("capacity_vph").get<double>()});
    }
    return set;
}

DemandScenario scenario_from_json(const json& doc, const std::string& source) {
    if (!doc.is_object() || !doc.contains("productions") || !doc.at("productions").is_object())
        throw LoadError(source + ": scenario needs a 'productions' object");
    DemandScenario scenario;
    scenario.name = doc.value("name", std::string("scenario"));
    for (const auto& [origin, vehicles] : doc.at("productions").items()) {
        if (!vehicles.is_number())
            throw LoadError(source + ": scenario '" + scenario.name + "': production of '" + origin +
                            "' is not a number");
        const double v = vehicles.get<double>();
        if (!std::isfinite(v) || v < 0.0)
            throw LoadError(source + ": scenario '" + scenario.name + "': negative production at origin '" +
                            origin + "'");
        scenario.productions.emplace_back(origin, v);
    }
    return scenario;
}

std::vector<DemandScenario> scenarios_from_json(const json& doc, const std::string& source) {
    std::vector<DemandScenario> out;
    if (doc.is_array())
        for (const auto& s : doc) out.push_back(scenario_from_json(s, source));
    else
        out.push_back(scenario_from_json(doc, source));
    return out;
}

json parse_json(std::string_view text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw LoadError(source + ": " + e.what());
    }
}

}  // namespace

NetworkData parse_network_csv(std::string_view nodes_csv, std::string_view links_csv, double speed,
                              const std::string& source) {
    NetworkData data;
    const CsvTable nodes = parse_csv(nodes_csv, source + "/nodes.csv");
    const std::size_t id_col = nodes.require("id");
    const std::size_t kind_col = nodes.require("kind");
    std::vector<Node> node_list;
    for (const auto& [line, f] : nodes.rows) {
        auto kind = parse_node_kind(f[kind_col]);
        if (!kind) bad_line(nodes.source, line, "unknown node kind '" + f[kind_col] + "'");
        node_list.push_back({f[id_col], *kind});
    }

    const CsvTable links = parse_csv(links_csv, source + "/links.csv");
    const std::size_t lid = links.require("id");
    const std::size_t from = links.require("from");
    const std::size_t to = links.require("to");
    const std::size_t cap = links.require("capacity_vph");
    const auto ff = links.column("free_flow_min");
    const auto len = links.column("length_mi");
    const auto sat = links.column("max_saturation");
    if (!ff && !len) throw LoadError(links.source + ": need a free_flow_min or length_mi column");
    std::vector<Link> link_list;
    for (const auto& [line, f] : links.rows) {
        auto optional_number = [&](std::optional<std::size_t> col, std::string_view name) -> std::optional<double> {
            if (!col || f[*col].empty()) return std::nullopt;
            return number_field(links, line, f[*col], name);
        };
        link_list.push_back(make_link(f[lid], f[from], f[to], number_field(links, line, f[cap], "capacity_vph"),
                                      optional_number(ff, "free_flow_min"), optional_number(len, "length_mi"),
                                      optional_number(sat, "max_saturation"), speed, data.warnings,
                                      links.source + ":" + std::to_string(line)));
    }
    data.network = Network(std::move(node_list), std::move(link_list));
    return data;
}

NetworkData load_network(const fs::path& path, double speed) {
    if (fs::is_directory(path))
        return parse_network_csv(read_text_file(path / "nodes.csv"), read_text_file(path / "links.csv"), speed,
                                 path.string());

    const std::string source = path.string();
    const json doc = parse_json(read_text_file(path), source);
    if (!doc.contains("nodes") || !doc.contains("links"))
        throw LoadError(source + ": network document needs 'nodes' and 'links'");
    NetworkData data;
    std::vector<Node> nodes;
    try {
        for (const auto& n : doc.at("nodes")) {
            const auto kind_text = n.at("kind").get<std::string>();
            auto kind = parse_node_kind(kind_text);
            if (!kind) throw LoadError(source + ": unknown node kind '" + kind_text + "'");
            nodes.push_back({n.at("id").get<std::string>(), *kind});
        }
        std::vector<Link> links;
        for (const auto& l : doc.at("links")) {
            auto opt = [&](const char* key) -> std::optional<double> {
                if (!l.contains(key) || l.at(key).is_null()) return std::nullopt;
                return l.at(key).get<double>();
            };
            links.push_back(make_link(l.at("id").get<std::string>(), l.at("from").get<std::string>(),
                                      l.at("to").get<std::string>(), l.at("capacity_vph").get<double>(),
                                      opt("free_flow_min"), opt("length_mi"), opt("max_saturation"), speed,
                                      data.warnings, source));
        }
        data.network = Network(std::move(nodes), std::move(links));
        if (doc.contains("shelters")) data.shelters = shelters_from_json(doc.at("shelters"), source);
        if (doc.contains("scenarios")) data.scenarios = scenarios_from_json(doc.at("scenarios"), source);
    } catch (const json::exception& e) {
        throw LoadError(source + ": " + e.what());
    }
    return data;
}

ShelterSet parse_shelters_csv(std::string_view text, const std::string& source) {
    const CsvTable t = parse_csv(text, source);
    const std::size_t node = t.require("node_id");
    const std::size_t cap = t.require("capacity_vph");
    ShelterSet set;
    for (const auto& [line, f] : t.rows) set.candidates.push_back({f[node], number_field(t, line, f[cap], "capacity_vph")});
    return set;
}

ShelterSet load_shelters(const fs::path& path) { return parse_shelters_csv(read_text_file(path), path.string()); }

std::vector<DemandScenario> parse_scenarios_json(std::string_view text, const std::string& source) {
    try {
        return scenarios_from_json(parse_json(text, source), source);
    } catch (const json::exception& e) {
        throw LoadError(source + ": " + e.what());
    }
}

std::vector<DemandScenario> load_scenarios(const fs::path& path) {
    return parse_scenarios_json(read_text_file(path), path.string());
}

ValidationReport validate_bundle(const Network& network, const ShelterSet& shelters,
                                 const std::vector<DemandScenario>& scenarios) {
    using Category = ValidationFinding::Category;
    ValidationReport report = validate_network(network, shelters);
    if (shelters.candidates.empty()) report.findings.push_back({Category::shelter, "", "no candidate shelters"});
    for (const auto& scenario : scenarios) {
        std::unordered_set<std::string> seen;
        for (const auto& [origin, vehicles] : scenario.productions) {
            auto node = network.find_node(origin);
            if (!node)
                report.findings.push_back({Category::node, origin, "scenario '" + scenario.name + "': unknown origin"});
            else if (network.nodes()[*node].kind != NodeKind::origin)
                report.findings.push_back(
                    {Category::node, origin, "scenario '" + scenario.name + "': node is not an origin"});
            if (!seen.insert(origin).second)
                report.findings.push_back(
                    {Category::node, origin, "scenario '" + scenario.name + "': duplicate production"});
            if (!std::isfinite(vehicles) || vehicles < 0.0)
                report.findings.push_back(
                    {Category::node, origin, "scenario '" + scenario.name + "': negative production"});
        }
    }
    return report;
}

ProblemBundle load_problem(const ProblemPaths& paths) {
    SolverSettings settings;
    if (!paths.config.empty()) settings = load_settings(paths.config);

    NetworkData data = load_network(paths.network, settings.free_flow_speed_mph);
    ProblemBundle bundle;
    bundle.network = std::move(data.network);
    bundle.warnings = std::move(data.warnings);

    if (!paths.shelters.empty())
        bundle.shelters = load_shelters(paths.shelters);
    else if (data.shelters)
        bundle.shelters = std::move(*data.shelters);
    else
        throw LoadError("no shelters file given and the network document carries no shelters");

    bundle.scenarios = std::move(data.scenarios);
    for (const auto& path : paths.scenarios) {
        auto loaded = load_scenarios(path);
        bundle.scenarios.insert(bundle.scenarios.end(), loaded.begin(), loaded.end());
    }
    if (bundle.scenarios.empty()) throw LoadError("no demand scenario given");

    bundle.impedance = settings.impedance;
    bundle.penalties = settings.penalties;
    bundle.ga = settings.ga;
    bundle.assignment = settings.assignment;

    ValidationReport report = validate_bundle(bundle.network, bundle.shelters, bundle.scenarios);
    if (!report.ok()) throw ValidationError(std::move(report));
    return bundle;
}

}  // namespace evac
