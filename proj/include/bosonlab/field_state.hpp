#pragma once

#include "bosonlab/lattice.hpp"

namespace bosonlab {

/// Single-particle wave function phi_t on the grid.
struct FieldState {
  GridFunction phi;
  double time = 0.0;

  const Grid& grid() const { return phi.grid; }
};

/// Normalized 1 + amplitude * cos(2 pi x_1): the default initial datum.
FieldState default_initial_field(const Grid& grid, double amplitude = 0.5);

/// Plane wave exp(2 pi i k x_1) (unit norm on the volume-one box).
FieldState plane_wave_field(const Grid& grid, int k = 1);

}  // namespace bosonlab
