#pragma once

#include "gmbe/factor_graph.hpp"
#include "gmbe/generators.hpp"
#include "gmbe/rng.hpp"

#include <cmath>
#include <cstdint>

namespace fixtures {

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

// Small random Forney model with binary variables and no empty factors.
inline gmbe::ForneyGraph small_forney(std::uint64_t seed, int factors = 5, int vars = 8,
                                      double t = 1.0) {
  return gmbe::gen_random_forney(factors, vars, 2, t, seed);
}

}  // namespace fixtures
