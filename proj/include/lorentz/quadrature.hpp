#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "lorentz/errors.hpp"
#include "lorentz/geometry.hpp"

namespace lorentz {

/// Gauss-Legendre rule on [-1,1]; nodes by Newton iteration on P_n.
struct GaussRule {
    std::vector<double> x, w;
};

inline const GaussRule& gauss_legendre(int n) {
    static thread_local std::vector<GaussRule> cache(128);
    if (n < 1 || n >= static_cast<int>(cache.size()))
        throw std::invalid_argument("gauss_legendre: order out of range");
    GaussRule& rule = cache[static_cast<std::size_t>(n)];
    if (!rule.x.empty()) return rule;

    rule.x.resize(static_cast<std::size_t>(n));
    rule.w.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre recurrence for P_n(x) and P_n'(x)
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.x[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.w[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

template <class F>
double fixed_gauss(F&& f, double a, double b, int n) {
    const GaussRule& r = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(mid + half * r.x[i]);
    return s * half;
}

namespace detail {

template <class F>
double adaptive_panel(F& f, double a, double b, double tol, int depth) {
    const double coarse = fixed_gauss(f, a, b, 7);
    const double fine = fixed_gauss(f, a, b, 15);
    const double err = std::abs(fine - coarse);
    if (err <= tol || depth >= 48) return fine;
    const double m = 0.5 * (a + b);
    return adaptive_panel(f, a, m, 0.5 * tol, depth + 1) +
           adaptive_panel(f, m, b, 0.5 * tol, depth + 1);
}

} // namespace detail

/// Adaptive 1D quadrature to absolute tolerance. The error estimate is the
/// difference between embedded 7- and 15-point Gauss rules per panel.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10) {
    if (a == b) return 0.0;
    return detail::adaptive_panel(f, a, b, abs_tol, 0);
}

/// Iterated adaptive quadrature of f over an axis-aligned box. Each inner
/// level runs at a tolerance tightened by the measure of the outer axes.
inline double integrate_box(const std::function<double(const Vec&)>& f, const Vec& lo,
                            const Vec& hi, int dim, double abs_tol = 1e-10) {
    std::function<double(Vec&, int, double)> rec = [&](Vec& p, int axis, double tol) -> double {
        if (axis == dim) return f(p);
        double outer = 1.0;
        for (int i = 0; i < axis; ++i) outer *= hi[i] - lo[i];
        const double level_tol = tol / std::max(1.0, 8.0 * outer);
        return integrate(
            [&](double x) {
                p[axis] = x;
                return rec(p, axis + 1, tol);
            },
            lo[axis], hi[axis], level_tol);
    };
    Vec p;
    return rec(p, 0, abs_tol);
}

} // namespace lorentz
