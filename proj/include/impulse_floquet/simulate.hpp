#pragma once

#include <vector>

#include "impulse_floquet/mat2.hpp"
#include "impulse_floquet/propagation.hpp"

namespace impulse_floquet {

struct SimulationRow {
    double t = 0.0;
    double x = 0.0;
    double u = 0.0;
    double z = 0.0;  // x divided by the running alpha product
    double v = 0.0;
    bool finite = true;
};

/// Samples the solution through `initial` at t = 0 over `periods` periods,
/// `samples` rows per period plus the final time kT. Rows take the right
/// limit at impulse times. Later periods use powers of the monodromy matrix
/// composed with the dense output of the first period.
std::vector<SimulationRow> simulate(const ImpulsiveSystem& system, int periods, int samples, Vec2 initial,
                                    const Tolerances& tol = {});

}  // namespace impulse_floquet
