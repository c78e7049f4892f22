#include "plidar/differential_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "plidar/error.hpp"
#include "plidar/random.hpp"

namespace plidar {

void DEConfig::validate() const {
  if (population_size < 4) throw InvalidInputError("DE population_size must be >= 4");
  if (!(weight_f > 0.0 && weight_f <= 2.0)) throw InvalidInputError("DE weight_f must be in (0, 2]");
  if (!(crossover_cr >= 0.0 && crossover_cr <= 1.0)) throw InvalidInputError("DE crossover_cr must be in [0, 1]");
  if (!(tol >= 0.0)) throw InvalidInputError("DE tol must be >= 0");
  if (workers == 0) throw InvalidInputError("DE workers must be >= 1");
}

namespace {

double safe_eval(const Objective& f, std::span<const double> x) {
  const double v = f(x);
  return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

void evaluate_all(const Objective& f, const std::vector<std::vector<double>>& xs, std::vector<double>& out,
                  std::size_t workers) {
  const std::size_t n = xs.size();
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = safe_eval(f, xs[i]);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) out[i] = safe_eval(f, xs[i]);
    });
  }
}

std::size_t argmin(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

DEResult differential_evolution(const Objective& objective, std::span<const double> lower,
                                std::span<const double> upper, const DEConfig& cfg,
                                std::span<const double> init) {
  cfg.validate();
  const std::size_t dim = lower.size();
  if (dim == 0 || upper.size() != dim || init.size() != dim) {
    throw InvalidInputError("differential_evolution: bounds and init must share a non-zero dimension");
  }
  for (std::size_t j = 0; j < dim; ++j) {
    if (!(lower[j] <= upper[j])) throw InvalidInputError("differential_evolution: lower bound exceeds upper bound");
    if (!(init[j] >= lower[j] && init[j] <= upper[j])) {
      throw InvalidInputError("differential_evolution: init lies outside the bounds");
    }
  }

  const std::size_t np = cfg.population_size;
  Rng rng(cfg.seed);

  std::vector<std::vector<double>> pop(np, std::vector<double>(dim));
  pop[0].assign(init.begin(), init.end());
  for (std::size_t i = 1; i < np; ++i) {
    for (std::size_t j = 0; j < dim; ++j) pop[i][j] = rng.uniform(lower[j], upper[j]);
  }
  std::vector<double> fit(np);
  evaluate_all(objective, pop, fit, cfg.workers);

  DEResult result;
  result.evaluations = np;
  std::size_t best = argmin(fit);
  result.history.push_back(fit[best]);

  std::vector<std::vector<double>> trials(np, std::vector<double>(dim));
  std::vector<double> trial_fit(np);
  for (std::size_t gen = 0; gen < cfg.max_generations; ++gen) {
    const auto [lo_it, hi_it] = std::minmax_element(fit.begin(), fit.end());
    if (*hi_it - *lo_it < cfg.tol) break;

    for (std::size_t i = 0; i < np; ++i) {
      std::size_t r1, r2, r3;
      do r1 = rng.index(np); while (r1 == i);
      do r2 = rng.index(np); while (r2 == i || r2 == r1);
      do r3 = rng.index(np); while (r3 == i || r3 == r1 || r3 == r2);
      const std::size_t forced = rng.index(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        const bool cross = rng.uniform() < cfg.crossover_cr || j == forced;
        if (cross) {
          const double m = pop[r1][j] + cfg.weight_f * (pop[r2][j] - pop[r3][j]);
          trials[i][j] = std::clamp(m, lower[j], upper[j]);
        } else {
          trials[i][j] = pop[i][j];
        }
      }
    }
    evaluate_all(objective, trials, trial_fit, cfg.workers);
    result.evaluations += np;

    for (std::size_t i = 0; i < np; ++i) {
      if (trial_fit[i] <= fit[i]) {
        pop[i].swap(trials[i]);
        fit[i] = trial_fit[i];
      }
    }
    best = argmin(fit);
    result.history.push_back(fit[best]);
    result.generations = gen + 1;
  }

  result.best = pop[best];
  result.value = fit[best];
  return result;
}

}  // namespace plidar
