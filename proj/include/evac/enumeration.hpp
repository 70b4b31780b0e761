#pragma once

#include <cstddef>
#include <vector>

#include "evac/ga.hpp"

namespace evac {

inline constexpr std::size_t kMaxEnumerationCandidates = 20;

struct EnumerationEntry {
    Selection selection;
    double penalized_objective = kWorstFitness;
    bool feasible = false;
    double total_evacuation_time = 0.0;

    bool operator==(const EnumerationEntry&) const = default;
};

/// Every non-empty subset, ordered by bit-string value (candidate 0 is the
/// most significant bit), and the index of the best one under ranks_before.
struct EnumerationReport {
    std::vector<EnumerationEntry> evaluations;
    std::size_t best = 0;

    const EnumerationEntry& best_entry() const { return evaluations.at(best); }
    bool operator==(const EnumerationReport&) const = default;
};

/// Brute force over all 2^J - 1 shelter subsets. Refuses J > 20.
EnumerationReport exhaustive_solve(const BilevelProblem& problem, bool parallel = false,
                                   std::size_t threads = 0);

}  // namespace evac
