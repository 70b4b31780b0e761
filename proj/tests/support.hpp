#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "evac/network.hpp"
#include "evac/problem_io.hpp"

namespace support {

inline std::filesystem::path data_dir() { return EVAC_DATA_DIR; }
inline std::filesystem::path fixture_dir() { return EVAC_FIXTURE_DIR; }

inline evac::Node origin(const std::string& id) { return {id, evac::NodeKind::origin}; }
inline evac::Node shelter(const std::string& id) { return {id, evac::NodeKind::shelter_candidate}; }
inline evac::Node inner(const std::string& id) { return {id, evac::NodeKind::intermediate}; }

inline evac::Link link(const std::string& id, const std::string& from, const std::string& to, double capacity,
                       double minutes, double saturation = 1.0) {
    return {id, from, to, capacity, minutes, saturation};
}

// Loads data/<name> with its shelters, every scenario file and config.txt.
inline evac::ProblemBundle load_instance(const std::string& name) {
    const auto root = data_dir() / name;
    evac::ProblemPaths paths;
    paths.network = root / "network";
    paths.shelters = root / "shelters.csv";
    std::vector<std::filesystem::path> scenarios;
    for (const auto& entry : std::filesystem::directory_iterator(root / "scenarios")) scenarios.push_back(entry.path());
    std::sort(scenarios.begin(), scenarios.end());
    paths.scenarios = scenarios;
    if (std::filesystem::exists(root / "config.txt")) paths.config = root / "config.txt";
    return evac::load_problem(paths);
}

inline const std::vector<std::string>& small_instances() {
    static const std::vector<std::string> names{"tiny", "symmetric", "triangle", "junction"};
    return names;
}
inline const std::vector<std::string>& desk_instances() {
    static const std::vector<std::string> names{"desk4", "desk5", "desk6"};
    return names;
}
inline const std::vector<std::string>& all_instances() {
    static const std::vector<std::string> names{"tiny", "symmetric", "triangle", "junction",
                                                "desk4", "desk5", "desk6", "town"};
    return names;
}

}  // namespace support
