#include "smoothbench/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <thread>

#include "smoothbench/error.hpp"

namespace smoothbench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string quantized_key(const Genome& g) {
  std::string key;
  char buf[32];
  for (double v : g) {
    std::snprintf(buf, sizeof buf, "%.6g;", v);
    key += buf;
  }
  return key;
}

double draw_gene(const ParamBound& b, Rng& rng) {
  switch (b.kind) {
    case ParamKind::Real:
      return uniform_real(rng, b.min, b.max);
    case ParamKind::Integer: {
      const auto count = static_cast<std::uint64_t>(b.max - b.min) + 1;
      return b.min + static_cast<double>(uniform_index(rng, count));
    }
    case ParamKind::OddInteger: {
      const double lo = std::fmod(std::fabs(b.min), 2.0) == 1.0 ? b.min : b.min + 1;
      const double hi = std::fmod(std::fabs(b.max), 2.0) == 1.0 ? b.max : b.max - 1;
      const auto count = static_cast<std::uint64_t>((hi - lo) / 2) + 1;
      return lo + 2.0 * static_cast<double>(uniform_index(rng, count));
    }
  }
  return b.min;
}

// Evaluates jobs[i] into out[i]; with more than one thread the index range is split in
// contiguous chunks, so the result does not depend on scheduling.
void evaluate_all(const std::vector<const Genome*>& jobs, std::vector<double>& out, const FitnessFn& fitness,
                  unsigned threads) {
  out.assign(jobs.size(), kInf);
  auto run = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      try {
        const double f = fitness(*jobs[i]);
        out[i] = std::isnan(f) ? kInf : f;
      } catch (const Error&) {
        out[i] = kInf;
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), jobs.size());
  if (workers <= 1) {
    run(0, jobs.size());
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (jobs.size() + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk, hi = std::min(jobs.size(), lo + chunk);
    if (lo < hi) pool.emplace_back(run, lo, hi);
  }
}

class FitnessCache {
 public:
  FitnessCache(const FitnessFn& fitness, unsigned threads) : fitness_(fitness), threads_(threads) {}

  void evaluate(std::vector<Individual>& population) {
    std::vector<const Genome*> jobs;
    std::vector<std::string> keys;
    for (auto& ind : population) {
      auto key = quantized_key(ind.genome);
      if (!cache_.contains(key) && std::find(keys.begin(), keys.end(), key) == keys.end()) {
        jobs.push_back(&ind.genome);
        keys.push_back(std::move(key));
      }
    }
    std::vector<double> results;
    evaluate_all(jobs, results, fitness_, threads_);
    for (std::size_t i = 0; i < keys.size(); ++i) cache_.emplace(keys[i], results[i]);
    evaluations_ += jobs.size();
    for (auto& ind : population) ind.fitness = cache_.at(quantized_key(ind.genome));
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  const FitnessFn& fitness_;
  unsigned threads_;
  std::map<std::string, double> cache_;
  std::size_t evaluations_ = 0;
};

std::size_t best_index(const std::vector<Individual>& pop) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < pop.size(); ++i) {
    if (pop[i].fitness < pop[best].fitness) best = i;
  }
  return best;
}

void check_viability(const std::vector<Individual>& pop) {
  const auto viable = std::count_if(pop.begin(), pop.end(), [](const Individual& i) { return i.fitness < kInf; });
  if (static_cast<double>(viable) < 0.9 * static_cast<double>(pop.size())) {
    throw Error(ErrorKind::EvaluationFailure, "only " + std::to_string(viable) + " of " +
                                                  std::to_string(pop.size()) + " individuals could be evaluated");
  }
}

}  // namespace

GaConfig GaConfig::paper_fidelity() { return {}; }

GaConfig GaConfig::desk_scale() {
  GaConfig c;
  c.population_size = 30;
  c.iterations = 100;
  return c;
}

std::size_t GaConfig::elite_count() const {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(elitism_fraction * population_size)));
}

void GaConfig::validate() const {
  auto rate = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (population_size < 2) throw Error(ErrorKind::InvalidParams, "GA population must hold at least 2 individuals");
  if (!rate(mutation_rate) || !rate(crossover_rate) || !rate(elitism_fraction)) {
    throw Error(ErrorKind::InvalidParams, "GA rates must lie in [0, 1]");
  }
  if (elite_count() >= population_size) {
    throw Error(ErrorKind::InvalidParams, "elitism leaves no room for offspring");
  }
}

const Individual& roulette_select(std::span<const Individual> population, Rng& rng) {
  if (population.empty()) throw Error(ErrorKind::EmptyInput, "cannot select from an empty population");
  if (population.size() == 1) return population.front();

  std::vector<std::size_t> champions;
  double lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i < population.size(); ++i) {
    const double f = population[i].fitness;
    if (f == -kInf) champions.push_back(i);
    if (std::isfinite(f)) {
      lo = std::min(lo, f);
      hi = std::max(hi, f);
    }
  }
  if (!champions.empty()) return population[champions[uniform_index(rng, champions.size())]];
  if (!std::isfinite(hi)) return population[uniform_index(rng, population.size())];

  const double eps = hi > lo ? 1e-6 * (hi - lo) : 1.0;
  std::vector<double> cumulative(population.size());
  double total = 0.0;
  for (std::size_t i = 0; i < population.size(); ++i) {
    const double f = population[i].fitness;
    total += std::isfinite(f) ? hi - f + eps : 0.0;
    cumulative[i] = total;
  }
  const double target = uniform01(rng) * total;
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  auto idx = static_cast<std::size_t>(std::distance(cumulative.begin(), it));
  idx = std::min(idx, population.size() - 1);
  while (!std::isfinite(population[idx].fitness)) --idx;  // zero-width slots precede a finite one
  return population[idx];
}

std::pair<Genome, Genome> two_point_crossover_at(const Genome& a, const Genome& b, std::size_t first_cut,
                                                 std::size_t second_cut) {
  if (a.size() != b.size()) throw Error(ErrorKind::InvalidParams, "crossover parents differ in length");
  if (first_cut > second_cut || second_cut > a.size()) throw Error(ErrorKind::InvalidParams, "bad crossover cuts");
  Genome c = a, d = b;
  for (std::size_t i = first_cut; i < second_cut; ++i) std::swap(c[i], d[i]);
  return {std::move(c), std::move(d)};
}

std::pair<Genome, Genome> two_point_crossover(const Genome& a, const Genome& b, Rng& rng) {
  const std::size_t n = a.size();
  if (n == 0 || n != b.size()) throw Error(ErrorKind::InvalidParams, "crossover needs equal nonempty genomes");
  if (n == 1) {
    if (uniform01(rng) < 0.5) return {a, b};
    return {b, a};
  }
  if (n == 2) return two_point_crossover_at(a, b, 1, 2);
  // Two distinct interior cut points in 1..n-1.
  std::size_t c1 = 1 + uniform_index(rng, n - 1);
  std::size_t c2 = 1 + uniform_index(rng, n - 2);
  if (c2 >= c1) ++c2;
  if (c1 > c2) std::swap(c1, c2);
  return two_point_crossover_at(a, b, c1, c2);
}

Genome random_genome(std::span<const ParamBound> bounds, Rng& rng) {
  Genome g(bounds.size());
  for (std::size_t i = 0; i < bounds.size(); ++i) g[i] = draw_gene(bounds[i], rng);
  return g;
}

void mutate(Genome& genome, std::span<const ParamBound> bounds, double rate, Rng& rng) {
  for (std::size_t i = 0; i < genome.size(); ++i) {
    if (uniform01(rng) < rate) genome[i] = draw_gene(bounds[i], rng);
  }
}

GaResult genetic_minimize(std::span<const ParamBound> bounds, const FitnessFn& fitness, const RepairFn& repair,
                          const GaConfig& config) {
  config.validate();
  if (bounds.empty()) throw Error(ErrorKind::NonParametricMethod, "nothing to calibrate");
  Rng rng(config.seed);
  FitnessCache cache(fitness, config.threads);

  std::vector<Individual> pop(config.population_size);
  for (auto& ind : pop) ind.genome = repair(random_genome(bounds, rng));
  cache.evaluate(pop);
  check_viability(pop);

  GaResult result;
  Individual best = pop[best_index(pop)];
  result.best_per_generation.push_back(best.fitness);
  std::size_t stagnant = 0;
  const std::size_t elites = config.elite_count();

  for (std::size_t gen = 0; gen < config.iterations; ++gen) {
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pop[a].fitness < pop[b].fitness; });

    std::vector<Individual> next;
    next.reserve(pop.size());
    for (std::size_t e = 0; e < elites; ++e) next.push_back(pop[order[e]]);
    // All random draws for the generation happen before any evaluation.
    while (next.size() < pop.size()) {
      const Genome& a = roulette_select(pop, rng).genome;
      const Genome& b = roulette_select(pop, rng).genome;
      auto [c, d] = uniform01(rng) < config.crossover_rate ? two_point_crossover(a, b, rng) : std::make_pair(a, b);
      mutate(c, bounds, config.mutation_rate, rng);
      mutate(d, bounds, config.mutation_rate, rng);
      next.push_back({repair(std::move(c)), kInf});
      if (next.size() < pop.size()) next.push_back({repair(std::move(d)), kInf});
    }
    cache.evaluate(next);
    check_viability(next);
    pop = std::move(next);

    const Individual& gen_best = pop[best_index(pop)];
    if (gen_best.fitness < best.fitness) {
      best = gen_best;
      stagnant = 0;
    } else {
      ++stagnant;
    }
    result.best_per_generation.push_back(gen_best.fitness);
    if (config.patience && stagnant >= *config.patience) break;
  }
  result.best = best.genome;
  result.best_fitness = best.fitness;
  result.evaluations = cache.evaluations();
  return result;
}

CalibrationResult calibrate(MethodId method, const TimeSeries& series, const GaConfig& config, Objective objective,
                            AicSign sign) {
  if (!is_parametric(method)) {
    throw Error(ErrorKind::NonParametricMethod, method_label(method) + " has no parameters to calibrate");
  }
  const auto bounds = method_info(method).params;
  auto evaluate = [&](const Genome& g) { return evaluate_method({method, g}, series, sign); };

  // The combined objective standardizes against a reference sample drawn once up front,
  // so fitness values stay comparable across generations.
  struct Scale {
    double mean = 0.0, sd = 1.0;
  };
  Scale s_mae, s_var, s_aic;
  if (objective == Objective::Combined) {
    Rng ref_rng(mix_seed(config.seed, 0xC0FFEEULL));
    std::vector<PerformanceIndex> refs;
    for (int i = 0; i < 20; ++i) {
      try {
        refs.push_back(evaluate(repair_params(method, random_genome(bounds, ref_rng))));
      } catch (const Error&) {
      }
    }
    auto fit_scale = [&](auto proj) {
      std::vector<double> v;
      for (const auto& r : refs) {
        const double x = proj(r);
        if (std::isfinite(x)) v.push_back(x);
      }
      Scale sc;
      if (v.size() < 2) return sc;
      sc.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      double ss = 0.0;
      for (double x : v) ss += (x - sc.mean) * (x - sc.mean);
      const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
      sc.sd = sd > 0.0 ? sd : 1.0;
      return sc;
    };
    s_mae = fit_scale([](const PerformanceIndex& p) { return p.mae; });
    s_var = fit_scale([](const PerformanceIndex& p) { return p.var; });
    s_aic = fit_scale([](const PerformanceIndex& p) { return p.aic; });
  }

  auto score = [&](const PerformanceIndex& pi) {
    switch (objective) {
      case Objective::Aic: return pi.aic;
      case Objective::Mae: return pi.mae;
      case Objective::Combined:
        return (pi.mae - s_mae.mean) / s_mae.sd + (pi.var - s_var.mean) / s_var.sd +
               (pi.aic - s_aic.mean) / s_aic.sd;
    }
    return kInf;
  };
  const FitnessFn fitness = [&](const Genome& g) { return score(evaluate(g)); };
  const RepairFn repair = [method](Genome g) { return repair_params(method, std::move(g)); };

  CalibrationResult out;
  out.search = genetic_minimize(bounds, fitness, repair, config);
  out.spec = {method, out.search.best};
  out.index = evaluate(out.spec.params);
  out.fitness = out.search.best_fitness;
  return out;
}

}  // namespace smoothbench
