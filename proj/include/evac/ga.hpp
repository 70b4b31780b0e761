#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "evac/assignment.hpp"
#include "evac/network.hpp"

namespace evac {

/// Fitness given to selections that cannot be evaluated (no open shelter,
/// unreachable origin). Finite so population means stay finite.
inline constexpr double kWorstFitness = 1e300;

struct PenaltyConfig {
    double alpha_shelter = 1e6;  // per vph of shelter excess
    double beta_link = 1e6;      // per vph of link excess

    void validate() const;
    bool operator==(const PenaltyConfig&) const = default;
};

enum class MutationMode { per_individual, per_bit };

std::string to_string(MutationMode mode);
MutationMode parse_mutation_mode(std::string_view text);

struct GAConfig {
    std::size_t population_size = 20;
    std::size_t max_generations = 50;
    double reproduction_rate = 0.6;
    double mutation_probability = 0.4;
    std::uint64_t rng_seed = 1;
    std::size_t elitism_count = 1;
    MutationMode mutation_mode = MutationMode::per_individual;
    bool parallel_evaluation = false;
    bool cache_fitness = true;
    std::size_t threads = 0;  // 0 = hardware concurrency

    void validate() const;  // throws std::invalid_argument
    bool operator==(const GAConfig&) const = default;
};

/// Everything a fitness evaluation depends on besides the chromosome.
struct BilevelProblem {
    const Network& network;
    const ShelterSet& shelters;
    const DemandScenario& demand;
    ImpedanceParameter impedance;
    PenaltyConfig penalties;
    AssignmentConfig assignment;
};

/// Total evacuation time plus weighted shelter and link capacity excess.
double penalized_objective(const Network& network, const ShelterSet& shelters,
                           const Selection& selection, const AssignmentResult& result,
                           const PenaltyConfig& penalties);

struct Evaluation {
    double penalized_objective = kWorstFitness;
    double total_evacuation_time = 0.0;
    bool feasible = false;
    std::string diagnostic;  // non-empty when the lower level could not be solved
    std::shared_ptr<const AssignmentResult> assignment;

    bool solved() const { return assignment != nullptr; }
};

Evaluation evaluate_individual(const Selection& selection, const BilevelProblem& problem);

/// Strict ordering used by both the GA and the exhaustive oracle: lower
/// objective, then fewer open shelters, then the smaller bit string.
bool ranks_before(double objective_a, const Selection& a, double objective_b, const Selection& b);

struct GenerationStats {
    std::size_t generation = 0;
    double best_fitness = 0.0;  // incumbent after this generation
    double mean_fitness = 0.0;
    std::size_t feasible_count = 0;

    bool operator==(const GenerationStats&) const = default;
};

struct EvaluationRecord {
    Selection selection;
    double penalized_objective = 0.0;
    double total_evacuation_time = 0.0;
    bool feasible = false;

    bool operator==(const EvaluationRecord&) const = default;
};

struct AssignmentDiagnostics {
    std::size_t iterations = 0;
    double relative_gap = 0.0;
    bool converged = false;
    std::string message;

    bool operator==(const AssignmentDiagnostics&) const = default;
};

struct SolveReport {
    Selection best_selection;
    double best_penalized_objective = kWorstFitness;
    double best_total_evacuation_time = 0.0;
    std::vector<double> shelter_attraction;  // per candidate, vph
    bool feasible = false;
    std::vector<GenerationStats> history;
    /// Distinct chromosomes in order of first evaluation.
    std::vector<EvaluationRecord> evaluations;
    AssignmentDiagnostics assignment;
    /// Lower-level result of the best selection; null if it was unsolvable.
    std::shared_ptr<const AssignmentResult> best_assignment;

    bool operator==(const SolveReport& other) const;
};

SolveReport ga_solve(const BilevelProblem& problem, const GAConfig& ga);

/// Evaluates `selections` in order, optionally on worker threads. The output
/// order always matches the input order.
std::vector<Evaluation> evaluate_batch(const std::vector<Selection>& selections,
                                       const BilevelProblem& problem, bool parallel,
                                       std::size_t threads);

}  // namespace evac
