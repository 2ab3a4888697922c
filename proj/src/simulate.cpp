#include "impulse_floquet/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace impulse_floquet {

std::vector<SimulationRow> simulate(const ImpulsiveSystem& system, int periods, int samples, Vec2 initial,
                                    const Tolerances& tol) {
    if (periods < 0 || samples < 1) throw std::invalid_argument("simulate: periods >= 0 and samples >= 1 required");
    std::vector<SimulationRow> rows;
    if (periods == 0) return rows;
    const double T = system.period();
    const auto phi = integrate_fundamental(system, 0.0, T, tol);
    const Mat2 x_t = to_matrix(phi.at(T, Side::left));
    const double period_scale = system.schedule().alpha_product();
    Mat2 power = Mat2::identity();
    double scale_power = 1.0;
    rows.reserve(static_cast<std::size_t>(periods) * samples + 1);
    for (int k = 0; k <= periods; ++k) {
        const Vec2 start = power * initial;
        const int last = k == periods ? 1 : samples;
        for (int j = 0; j < last; ++j) {
            const double tau = T * j / samples;
            const Vec2 y = to_matrix(phi.at(tau, Side::right)) * start;
            const double s = scale_power * phi.alpha_scale(tau, Side::right);
            SimulationRow row{k * T + tau, y.x, y.u, y.x / s, y.u / s, true};
            row.finite = std::isfinite(y.x) && std::isfinite(y.u) && std::isfinite(s) && s != 0.0;
            rows.push_back(row);
        }
        power = x_t * power;
        scale_power *= period_scale;
    }
    return rows;
}

}  // namespace impulse_floquet
