#include "evac/enumeration.hpp"

#include <stdexcept>
#include <string>

namespace evac {

EnumerationReport exhaustive_solve(const BilevelProblem& problem, bool parallel, std::size_t threads) {
    const std::size_t genes = problem.shelters.size();
    if (genes == 0) throw std::invalid_argument("exhaustive_solve: no candidate shelters");
    if (genes > kMaxEnumerationCandidates)
        throw std::invalid_argument("exhaustive_solve: " + std::to_string(genes) +
                                    " candidates exceed the limit of " +
                                    std::to_string(kMaxEnumerationCandidates));
    problem.penalties.validate();
    problem.assignment.validate();

    const std::size_t subsets = (std::size_t{1} << genes) - 1;
    std::vector<Selection> selections;
    selections.reserve(subsets);
    for (std::size_t mask = 1; mask <= subsets; ++mask) {
        Selection s(genes);
        for (std::size_t j = 0; j < genes; ++j) s[j] = ((mask >> (genes - 1 - j)) & 1U) != 0;
        selections.push_back(std::move(s));
    }

    const auto evals = evaluate_batch(selections, problem, parallel, threads);
    EnumerationReport report;
    report.evaluations.reserve(subsets);
    for (std::size_t k = 0; k < subsets; ++k) {
        report.evaluations.push_back({std::move(selections[k]), evals[k].penalized_objective, evals[k].feasible,
                                      evals[k].total_evacuation_time});
        const auto& entry = report.evaluations.back();
        const auto& best = report.evaluations[report.best];
        if (ranks_before(entry.penalized_objective, entry.selection, best.penalized_objective, best.selection))
            report.best = k;
    }
    return report;
}

}  // namespace evac
