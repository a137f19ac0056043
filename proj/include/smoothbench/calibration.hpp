#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "smoothbench/evaluation.hpp"
#include "smoothbench/random.hpp"
#include "smoothbench/smoothers.hpp"

namespace smoothbench {

struct GaConfig {
  std::size_t population_size = 100;
  std::size_t iterations = 1000;
  double mutation_rate = 0.1;
  double crossover_rate = 0.8;
  double elitism_fraction = 0.05;
  std::uint64_t seed = 42;
  std::optional<std::size_t> patience;  // stop after this many generations without improvement
  unsigned threads = 1;                 // fitness evaluations per generation may run concurrently

  /// Population 100, 1000 generations.
  static GaConfig paper_fidelity();
  /// Population 30, 100 generations.
  static GaConfig desk_scale();

  std::size_t elite_count() const;
  void validate() const;
};

enum class Objective { Aic, Mae, Combined };

using Genome = std::vector<double>;

struct Individual {
  Genome genome;
  double fitness;  // lower is better; +infinity marks a failed evaluation
};

/// Fitness-proportional selection for minimization: weight = max_finite - f + eps.
/// Individuals at +infinity are never picked unless all are; -infinity ones win outright.
const Individual& roulette_select(std::span<const Individual> population, Rng& rng);

/// Exchanges the segment [first_cut, second_cut) between the parents.
std::pair<Genome, Genome> two_point_crossover_at(const Genome& a, const Genome& b, std::size_t first_cut,
                                                 std::size_t second_cut);
/// Cuts drawn uniformly; genomes of length 2 use one cut and length 1 swaps or not.
std::pair<Genome, Genome> two_point_crossover(const Genome& a, const Genome& b, Rng& rng);

/// Uniformly drawn genome inside the bounds, honouring integer and odd kinds.
Genome random_genome(std::span<const ParamBound> bounds, Rng& rng);
/// Resamples each gene with probability `rate`.
void mutate(Genome& genome, std::span<const ParamBound> bounds, double rate, Rng& rng);

struct GaResult {
  Genome best;
  double best_fitness;
  std::vector<double> best_per_generation;  // index 0 is the initial population
  std::size_t evaluations = 0;              // distinct fitness evaluations after caching
};

using FitnessFn = std::function<double(const Genome&)>;
using RepairFn = std::function<Genome(Genome)>;

/// Generic elitist GA over a mixed integer/real box. `repair` maps genomes onto the
/// feasible set after initialization, crossover and mutation.
GaResult genetic_minimize(std::span<const ParamBound> bounds, const FitnessFn& fitness, const RepairFn& repair,
                          const GaConfig& config);

struct CalibrationResult {
  SmootherSpec spec;
  PerformanceIndex index;
  double fitness;
  GaResult search;
};

/// Calibrates a parametric smoother on the LOOCV indices of `series`.
CalibrationResult calibrate(MethodId method, const TimeSeries& series, const GaConfig& config,
                            Objective objective = Objective::Aic, AicSign sign = AicSign::Paper);

}  // namespace smoothbench
