#include "impulse_floquet/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>
#include <numbers>

namespace impulse_floquet::quadrature {

namespace {

GaussRule build_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

}  // namespace

const GaussRule& gauss_legendre_rule(int n) {
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
    return it->second;
}

double gauss_legendre(const Integrand& f, double lo, double hi, int n) {
    const GaussRule& rule = gauss_legendre_rule(n);
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return sum * half;
}

double adaptive(const Integrand& f, double lo, double hi, double rel_tol, double abs_floor) {
    if (!(hi > lo)) return 0.0;
    const double width = hi - lo;

    // Coarse magnitude estimate sets the absolute error budget.
    double scale = 0.0;
    {
        const int cells = 4;
        const double h = width / cells;
        for (int k = 0; k < cells; ++k)
            scale += gauss_legendre([&](double t) { return std::abs(f(t)); }, lo + k * h, lo + (k + 1) * h);
    }
    const double budget = std::max(rel_tol * scale, abs_floor);

    struct Cell {
        double lo, hi, value, err;
        bool operator<(const Cell& o) const { return err < o.err; }
    };
    const auto split = [&](double a, double b, double whole) {
        const double mid = 0.5 * (a + b);
        const double left = gauss_legendre(f, a, mid);
        const double right = gauss_legendre(f, mid, b);
        return Cell{a, b, left + right, std::abs(left + right - whole)};
    };
    std::priority_queue<Cell> heap;
    Cell first = split(lo, hi, gauss_legendre(f, lo, hi));
    double err_total = first.err;
    heap.push(first);
    // Global refinement of the worst cell. The cell cap bounds the cost when
    // rounding noise in f keeps the estimate above the budget.
    constexpr std::size_t max_cells = 4096;
    while (err_total > budget && heap.size() < max_cells) {
        const Cell worst = heap.top();
        if (worst.hi - worst.lo <= 1e-15 * width) break;
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        const Cell left = split(worst.lo, mid, gauss_legendre(f, worst.lo, mid));
        const Cell right = split(mid, worst.hi, gauss_legendre(f, mid, worst.hi));
        err_total += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
    }
    double total = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        heap.pop();
    }
    return total;
}

double bisect(const Integrand& f, double lo, double hi, double resolution) {
    double flo = f(lo);
    for (int iter = 0; iter < 200 && hi - lo > resolution; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<double> sign_changes(const Integrand& f, double lo, double hi, double resolution, int cells) {
    std::vector<double> roots;
    if (!(hi > lo)) return roots;
    const GaussRule& rule = gauss_legendre_rule(8);
    std::vector<double> ts;
    ts.reserve(cells * rule.nodes.size() + 2);
    ts.push_back(lo);
    const double h = (hi - lo) / cells;
    for (int k = 0; k < cells; ++k) {
        const double a = lo + k * h;
        // Nodes are generated in descending order on [-1, 1].
        for (auto it = rule.nodes.rbegin(); it != rule.nodes.rend(); ++it) ts.push_back(a + 0.5 * h * (*it + 1.0));
    }
    ts.push_back(hi);

    double t_prev = ts.front();
    double f_prev = f(t_prev);
    if (f_prev == 0.0) roots.push_back(t_prev);
    for (std::size_t i = 1; i < ts.size(); ++i) {
        const double t = ts[i];
        const double ft = f(t);
        if (ft == 0.0) {
            roots.push_back(t);
        } else if (f_prev != 0.0 && ((ft < 0.0) != (f_prev < 0.0))) {
            roots.push_back(bisect(f, t_prev, t, resolution));
        }
        t_prev = t;
        f_prev = ft;
    }
    return roots;
}

double golden_maximize(const Integrand& f, double lo, double hi, double resolution) {
    constexpr double inv_phi = 0.6180339887498949;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    for (int iter = 0; iter < 200 && hi - lo > resolution; ++iter) {
        if (fc >= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    return fc >= fd ? c : d;
}

}  // namespace impulse_floquet::quadrature
