#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace plidar {

/// DE/rand/1/bin settings.
struct DEConfig {
  std::size_t population_size = 105;  // 15 per dimension for 7 parameters
  double weight_f = 0.8;
  double crossover_cr = 0.9;
  std::size_t max_generations = 200;
  double tol = 1e-8;  ///< stop once max(fitness) - min(fitness) < tol
  std::uint64_t seed = 0;
  std::size_t workers = 1;  ///< threads used to evaluate a generation's trials

  /// Throws InvalidInputError when a field violates its range.
  void validate() const;
};

struct DEResult {
  std::vector<double> best;
  double value = 0.0;
  std::size_t generations = 0;
  std::size_t evaluations = 0;
  /// Best-so-far value after initialization and after each generation.
  std::vector<double> history;
};

using Objective = std::function<double(std::span<const double>)>;

/// Minimizes `objective` inside the box [lower, upper].
///
/// The initial population is uniform in the bounds with member 0 set to
/// `init`. Each generation builds every trial from the current population
/// (mutant x_r1 + F (x_r2 - x_r3) clipped to the bounds, binomial crossover
/// with one forced coordinate), then applies greedy selection. Random draws
/// happen in a fixed order before any evaluation, so the trajectory depends
/// only on the seed and not on `workers`. NaN objective values count as +inf.
///
/// Throws InvalidInputError if the bounds are inconsistent or `init` lies
/// outside them.
DEResult differential_evolution(const Objective& objective, std::span<const double> lower,
                                std::span<const double> upper, const DEConfig& cfg,
                                std::span<const double> init);

}  // namespace plidar
