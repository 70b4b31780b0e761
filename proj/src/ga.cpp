#include "evac/ga.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace evac {

void PenaltyConfig::validate() const {
    if (!std::isfinite(alpha_shelter) || alpha_shelter < 0.0)
        throw std::invalid_argument("penalty.alpha_shelter must be finite and >= 0");
    if (!std::isfinite(beta_link) || beta_link < 0.0)
        throw std::invalid_argument("penalty.beta_link must be finite and >= 0");
}

std::string to_string(MutationMode mode) {
    return mode == MutationMode::per_individual ? "per-individual" : "per-bit";
}

MutationMode parse_mutation_mode(std::string_view text) {
    if (text == "per-individual" || text == "per_individual") return MutationMode::per_individual;
    if (text == "per-bit" || text == "per_bit") return MutationMode::per_bit;
    throw std::invalid_argument("unknown mutation mode '" + std::string(text) + "'");
}

void GAConfig::validate() const {
    if (population_size < 2) throw std::invalid_argument("ga.population_size must be >= 2");
    if (max_generations < 1) throw std::invalid_argument("ga.max_generations must be >= 1");
    if (!(reproduction_rate > 0.0 && reproduction_rate <= 1.0))
        throw std::invalid_argument("ga.reproduction_rate must lie in (0, 1]");
    if (!(mutation_probability >= 0.0 && mutation_probability <= 1.0))
        throw std::invalid_argument("ga.mutation_probability must lie in [0, 1]");
    if (elitism_count >= population_size)
        throw std::invalid_argument("ga.elitism_count must be smaller than ga.population_size");
}

double penalized_objective(const Network& network, const ShelterSet& shelters, const Selection& selection,
                           const AssignmentResult& result, const PenaltyConfig& penalties) {
    const auto violations = constraint_violations(network, shelters, selection, result);
    return total_evacuation_time(network, result) +
           penalties.alpha_shelter * violations.total_shelter_excess() +
           penalties.beta_link * violations.total_link_excess();
}

Evaluation evaluate_individual(const Selection& selection, const BilevelProblem& problem) {
    if (selection.size() != problem.shelters.size())
        throw std::invalid_argument("chromosome length " + std::to_string(selection.size()) +
                                    " does not match " + std::to_string(problem.shelters.size()) +
                                    " candidates");
    Evaluation eval;
    if (std::none_of(selection.begin(), selection.end(), [](bool b) { return b; })) {
        eval.diagnostic = "no open shelter";
        return eval;
    }
    const auto open = open_shelter_nodes(problem.network, problem.shelters, selection);
    try {
        eval.assignment = std::make_shared<const AssignmentResult>(
            solve_lower_level(problem.network, open, problem.demand, problem.impedance, problem.assignment));
    } catch (const AssignmentError& e) {
        eval.diagnostic = e.what();
        return eval;
    }
    const AssignmentResult& result = *eval.assignment;
    eval.total_evacuation_time = total_evacuation_time(problem.network, result);
    eval.penalized_objective =
        penalized_objective(problem.network, problem.shelters, selection, result, problem.penalties);
    eval.feasible = constraint_violations(problem.network, problem.shelters, selection, result).feasible();
    if (!result.converged)
        eval.diagnostic = "lower level stopped at max iterations (gap " +
                          std::to_string(result.relative_gap) + ")";
    return eval;
}

bool ranks_before(double objective_a, const Selection& a, double objective_b, const Selection& b) {
    if (objective_a != objective_b) return objective_a < objective_b;
    const auto open_a = std::count(a.begin(), a.end(), true);
    const auto open_b = std::count(b.begin(), b.end(), true);
    if (open_a != open_b) return open_a < open_b;
    return a < b;
}

bool SolveReport::operator==(const SolveReport& other) const {
    const bool same_assignment =
        (best_assignment == nullptr) == (other.best_assignment == nullptr) &&
        (best_assignment == nullptr || *best_assignment == *other.best_assignment);
    return best_selection == other.best_selection &&
           best_penalized_objective == other.best_penalized_objective &&
           best_total_evacuation_time == other.best_total_evacuation_time &&
           shelter_attraction == other.shelter_attraction && feasible == other.feasible &&
           history == other.history && evaluations == other.evaluations &&
           assignment == other.assignment && same_assignment;
}

std::vector<Evaluation> evaluate_batch(const std::vector<Selection>& selections, const BilevelProblem& problem,
                                       bool parallel, std::size_t threads) {
    std::vector<Evaluation> out(selections.size());
    if (!parallel || selections.size() < 2) {
        for (std::size_t i = 0; i < selections.size(); ++i) out[i] = evaluate_individual(selections[i], problem);
        return out;
    }
    std::size_t workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, selections.size());

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < selections.size(); i = next++) {
                try {
                    out[i] = evaluate_individual(selections[i], problem);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

namespace {

// Distribution helpers with fixed algorithms, so a seed reproduces the same
// run regardless of the standard library's distribution implementations.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t uniform_below(std::mt19937_64& rng, std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw = rng();
    while (draw >= limit) draw = rng();
    return static_cast<std::size_t>(draw % bound);
}

/// Linear rank selection: the best of N individuals has weight N, the worst 1.
std::size_t rank_select(std::mt19937_64& rng, const std::vector<std::size_t>& order) {
    const std::size_t n = order.size();
    std::size_t ticket = uniform_below(rng, n * (n + 1) / 2);
    for (std::size_t rank = 0; rank < n; ++rank) {
        const std::size_t weight = n - rank;
        if (ticket < weight) return order[rank];
        ticket -= weight;
    }
    return order.back();
}

}  // namespace

SolveReport ga_solve(const BilevelProblem& problem, const GAConfig& ga) {
    ga.validate();
    problem.penalties.validate();
    problem.assignment.validate();
    const std::size_t genes = problem.shelters.size();
    if (genes == 0) throw std::invalid_argument("ga_solve: no candidate shelters");

    std::mt19937_64 rng(ga.rng_seed);
    const std::size_t n = ga.population_size;

    std::vector<Selection> population;
    population.reserve(n);
    population.emplace_back(genes, true);
    while (population.size() < n) {
        Selection s(genes);
        for (std::size_t g = 0; g < genes; ++g) s[g] = (rng() >> 63) != 0;
        population.push_back(std::move(s));
    }

    std::unordered_map<Selection, Evaluation> cache;
    std::unordered_set<Selection> logged;
    SolveReport report;
    Selection incumbent;
    Evaluation incumbent_eval;

    for (std::size_t generation = 0; generation < ga.max_generations; ++generation) {
        // Fitness evaluation; random numbers are never drawn here.
        std::vector<Evaluation> evals(n);
        std::vector<bool> filled(n, false);
        std::vector<Selection> batch;
        std::vector<std::size_t> batch_slot;
        for (std::size_t i = 0; i < n; ++i) {
            if (ga.cache_fitness) {
                if (auto it = cache.find(population[i]); it != cache.end()) {
                    evals[i] = it->second;
                    filled[i] = true;
                    continue;
                }
                if (std::find(batch.begin(), batch.end(), population[i]) != batch.end()) continue;
            }
            batch.push_back(population[i]);
            batch_slot.push_back(i);
        }
        auto computed = evaluate_batch(batch, problem, ga.parallel_evaluation, ga.threads);
        for (std::size_t b = 0; b < batch.size(); ++b) {
            evals[batch_slot[b]] = computed[b];
            filled[batch_slot[b]] = true;
            if (ga.cache_fitness) cache.emplace(batch[b], std::move(computed[b]));
        }
        for (std::size_t i = 0; i < n; ++i)
            if (!filled[i]) evals[i] = cache.at(population[i]);

        for (std::size_t i = 0; i < n; ++i) {
            if (logged.insert(population[i]).second)
                report.evaluations.push_back({population[i], evals[i].penalized_objective,
                                              evals[i].total_evacuation_time, evals[i].feasible});
        }

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return ranks_before(evals[a].penalized_objective, population[a], evals[b].penalized_objective,
                                population[b]);
        });

        const std::size_t best = order.front();
        if (incumbent.empty() || ranks_before(evals[best].penalized_objective, population[best],
                                              incumbent_eval.penalized_objective, incumbent)) {
            incumbent = population[best];
            incumbent_eval = evals[best];
        }

        GenerationStats stats;
        stats.generation = generation;
        stats.best_fitness = incumbent_eval.penalized_objective;
        double sum = 0.0;
        for (const auto& e : evals) {
            sum += e.penalized_objective;
            if (e.feasible) ++stats.feasible_count;
        }
        stats.mean_fitness = sum / static_cast<double>(n);
        report.history.push_back(stats);

        if (generation + 1 == ga.max_generations) break;

        // Breeding.
        std::vector<Selection> next;
        next.reserve(n);
        for (std::size_t e = 0; e < ga.elitism_count; ++e) next.push_back(population[order[e]]);
        const std::size_t elites = next.size();
        const std::size_t free_slots = n - elites;
        const auto crossover_slots = static_cast<std::size_t>(
            std::llround(ga.reproduction_rate * static_cast<double>(free_slots)));

        while (next.size() < elites + crossover_slots) {
            const Selection& mother = population[rank_select(rng, order)];
            const Selection& father = population[rank_select(rng, order)];
            if (genes < 2) {
                next.push_back(mother);
                continue;
            }
            const std::size_t cut = 1 + uniform_below(rng, genes - 1);
            Selection first(mother.begin(), mother.begin() + static_cast<std::ptrdiff_t>(cut));
            first.insert(first.end(), father.begin() + static_cast<std::ptrdiff_t>(cut), father.end());
            Selection second(father.begin(), father.begin() + static_cast<std::ptrdiff_t>(cut));
            second.insert(second.end(), mother.begin() + static_cast<std::ptrdiff_t>(cut), mother.end());
            next.push_back(std::move(first));
            if (next.size() < elites + crossover_slots) next.push_back(std::move(second));
        }
        while (next.size() < n) next.push_back(population[rank_select(rng, order)]);

        for (std::size_t i = elites; i < n; ++i) {
            Selection& s = next[i];
            if (ga.mutation_mode == MutationMode::per_individual) {
                if (uniform01(rng) < ga.mutation_probability) {
                    const std::size_t bit = uniform_below(rng, genes);
                    s[bit] = !s[bit];
                }
            } else {
                for (std::size_t bit = 0; bit < genes; ++bit)
                    if (uniform01(rng) < ga.mutation_probability) s[bit] = !s[bit];
            }
        }
        population = std::move(next);
    }

    report.best_selection = incumbent;
    report.best_penalized_objective = incumbent_eval.penalized_objective;
    report.best_total_evacuation_time = incumbent_eval.total_evacuation_time;
    report.feasible = incumbent_eval.feasible;
    report.best_assignment = incumbent_eval.assignment;
    report.shelter_attraction.assign(genes, 0.0);
    if (incumbent_eval.assignment) {
        const auto& result = *incumbent_eval.assignment;
        for (std::size_t j = 0; j < genes; ++j)
            if (incumbent[j])
                report.shelter_attraction[j] =
                    result.attraction(problem.network.node_index(problem.shelters.candidates[j].node_id));
        report.assignment = {result.iterations, result.relative_gap, result.converged, incumbent_eval.diagnostic};
    } else {
        report.assignment.message = incumbent_eval.diagnostic;
    }
    return report;
}

}  // namespace evac
