#pragma once

#include "gmbe/factor_graph.hpp"

#include <cstdint>

namespace gmbe {

/// Spin-glass Ising model on a rows x cols grid (non-toroidal), spins in {-1, +1}
/// (state 0 is -1). Singletons exp(phi_v x_v) with phi_v ~ N(0, field_sigma),
/// pairwise exp(phi_uv x_u x_v) with phi_uv ~ N(0, t); the second argument of N
/// is a standard deviation. Variable (r, c) has id r * cols + c. Factors: all
/// singletons in variable order, then for each vertex in row-major order its
/// right edge and its down edge.
FactorGraph gen_ising_grid(int rows, int cols, double t, double field_sigma, std::uint64_t seed);

/// Levin-Nave checkerboard contraction of a grid Ising model into Forney form.
///
/// Plaquettes (i, j) for i in [-1, rows-1], j in [-1, cols-1] with i + j even
/// are clipped to the grid; every vertex lies in exactly two of them and every
/// grid edge in exactly one. Each plaquette becomes one factor over its
/// in-grid corners (4 inside, 2 on the border, 1 at the corners where it acts
/// as the uniform partner of an otherwise degree-1 spin). A vertex's singleton
/// potentials go to its lexicographically smaller covering plaquette.
ForneyGraph ising_to_forney(const FactorGraph& grid, int rows, int cols);

/// Cycle of `num_factors` ternary factors; variables join neighbours on the
/// cycle and factor i with factor i + num_factors / 2. log f ~ N(0, t).
ForneyGraph gen_forney_3regular(int num_factors, double t, std::uint64_t seed);

/// Same topology as gen_forney_3regular but every factor is invariant under
/// flipping all of its (binary) arguments.
ForneyGraph gen_symmetric_forney(int num_factors, double t, std::uint64_t seed);

/// Random Forney model: each variable's two endpoints land on two distinct
/// random factors. Factors left empty are dropped. log f ~ N(0, t).
ForneyGraph gen_random_forney(int num_factors, int num_vars, int card, double t,
                              std::uint64_t seed);

/// Random factor graph with `num_factors` factors of arity in [1, max_arity],
/// plus a singleton for any variable no factor picked.
FactorGraph gen_random_factor_graph(int num_vars, int num_factors, int max_arity, int card,
                                    double t, std::uint64_t seed);

}  // namespace gmbe
