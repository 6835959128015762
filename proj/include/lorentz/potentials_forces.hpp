#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "lorentz/config_scaling.hpp"
#include "lorentz/errors.hpp"
#include "lorentz/obstacle_field.hpp"
#include "lorentz/quadrature.hpp"

namespace lorentz {

/// Radial profile with value and two derivatives, compactly supported on
/// [0, support]. Evaluations at and beyond the support radius are exactly 0.
class RadialPotential {
  public:
    enum class Kind { Quartic, Cone, Table };

    /// amplitude * (1 - (r/R)^2)^2: vanishes with vanishing slope at R.
    static RadialPotential quartic(double support = 1.0, double amplitude = 1.0) {
        RadialPotential p;
        p.kind_ = Kind::Quartic;
        p.support_ = support;
        p.amplitude_ = amplitude;
        char buf[96];
        std::snprintf(buf, sizeof buf, "quartic(R=%g,a=%g)", support, amplitude);
        p.id_ = buf;
        return p;
    }

    /// amplitude * (1 - r/R): kinked at the support edge; kept as a
    /// deliberately non-admissible test profile.
    static RadialPotential cone(double support = 1.0, double amplitude = 1.0) {
        RadialPotential p;
        p.kind_ = Kind::Cone;
        p.support_ = support;
        p.amplitude_ = amplitude;
        char buf[96];
        std::snprintf(buf, sizeof buf, "cone(R=%g,a=%g)", support, amplitude);
        p.id_ = buf;
        return p;
    }

    static RadialPotential tabulated(std::vector<double> r, std::vector<double> v,
                                     std::vector<double> dv, std::vector<double> d2v,
                                     std::string id = "table") {
        const std::size_t n = r.size();
        if (n < 2 || v.size() != n || dv.size() != n || d2v.size() != n)
            throw spec_error("tabulated profile: need >= 2 rows of equal length");
        if (r.front() != 0.0) throw spec_error("tabulated profile: first radius must be 0");
        for (std::size_t i = 1; i < n; ++i)
            if (!(r[i] > r[i - 1])) throw spec_error("tabulated profile: radii must increase");
        RadialPotential p;
        p.kind_ = Kind::Table;
        p.support_ = r.back();
        p.r_ = std::move(r);
        p.v_ = std::move(v);
        p.dv_ = std::move(dv);
        p.d2v_ = std::move(d2v);
        p.id_ = std::move(id);
        return p;
    }

    /// CSV columns `r,value,dvalue,d2value`, strictly increasing r.
    static RadialPotential from_csv(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw spec_error("cannot open profile '" + path + "'");
        std::string line;
        std::vector<double> r, v, dv, d2v;
        bool first = true;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            if (first && line.find("r,") == 0) {
                first = false;
                continue;
            }
            first = false;
            std::istringstream ss(line);
            std::string item;
            double vals[4];
            for (int k = 0; k < 4; ++k) {
                if (!std::getline(ss, item, ','))
                    throw spec_error("profile '" + path + "': expected 4 columns");
                vals[k] = std::stod(item);
            }
            r.push_back(vals[0]);
            v.push_back(vals[1]);
            dv.push_back(vals[2]);
            d2v.push_back(vals[3]);
        }
        return tabulated(std::move(r), std::move(v), std::move(dv), std::move(d2v), path);
    }

    double support() const { return support_; }
    double value_at_zero() const { return value(0.0); }
    const std::string& id() const { return id_; }

    double value(double r) const {
        if (r >= support_ || r < 0.0) return 0.0;
        switch (kind_) {
            case Kind::Quartic: {
                const double s = r / support_;
                const double q = 1.0 - s * s;
                return amplitude_ * q * q;
            }
            case Kind::Cone:
                return amplitude_ * (1.0 - r / support_);
            case Kind::Table:
                return hermite(r, v_, dv_);
        }
        return 0.0;
    }

    double deriv(double r) const {
        if (r >= support_ || r < 0.0) return 0.0;
        switch (kind_) {
            case Kind::Quartic: {
                const double s = r / support_;
                return -4.0 * amplitude_ * s * (1.0 - s * s) / support_;
            }
            case Kind::Cone:
                return -amplitude_ / support_;
            case Kind::Table:
                return hermite(r, dv_, d2v_);
        }
        return 0.0;
    }

    double second_deriv(double r) const {
        if (r >= support_ || r < 0.0) return 0.0;
        switch (kind_) {
            case Kind::Quartic: {
                const double s = r / support_;
                return -4.0 * amplitude_ * (1.0 - 3.0 * s * s) / (support_ * support_);
            }
            case Kind::Cone:
                return 0.0;
            case Kind::Table:
                return linear(r, d2v_);
        }
        return 0.0;
    }

  private:
    std::size_t segment(double r) const {
        const auto it = std::upper_bound(r_.begin(), r_.end(), r);
        const std::size_t i = static_cast<std::size_t>(it - r_.begin());
        return std::min(std::max<std::size_t>(i, 1), r_.size() - 1) - 1;
    }

    double hermite(double r, const std::vector<double>& f, const std::vector<double>& df) const {
        const std::size_t i = segment(r);
        const double h = r_[i + 1] - r_[i];
        const double t = (r - r_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * f[i] + (t3 - 2 * t2 + t) * h * df[i] +
               (-2 * t3 + 3 * t2) * f[i + 1] + (t3 - t2) * h * df[i + 1];
    }

    double linear(double r, const std::vector<double>& f) const {
        const std::size_t i = segment(r);
        const double t = (r - r_[i]) / (r_[i + 1] - r_[i]);
        return (1.0 - t) * f[i] + t * f[i + 1];
    }

    Kind kind_ = Kind::Quartic;
    double support_ = 1.0;
    double amplitude_ = 1.0;
    std::vector<double> r_, v_, dv_, d2v_;
    std::string id_ = "quartic(R=1,a=1)";
};

enum class ProfileRole { Scattering, MeanField };

/// Report-style admissibility check. Scattering role demands a strictly
/// decreasing profile with positive core; both roles demand a W^{2,inf}
/// zero-extension: value and first derivative vanish at the support edge.
struct ProfileValidation {
    bool positive_at_zero = true;
    bool monotone = true;
    bool vanishes_at_support = true;
    bool derivative_vanishes_at_support = true;
    bool second_derivative_bounded = true;
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

inline ProfileValidation validate_profile(const RadialPotential& p, ProfileRole role) {
    ProfileValidation rep;
    const double R = p.support();
    const double scale = std::max(std::abs(p.value_at_zero()), 1e-300);
    const int n = 10000;

    if (role == ProfileRole::Scattering && !(p.value_at_zero() > 0.0)) {
        rep.positive_at_zero = false;
        rep.violations.push_back("value at r=0 must be positive for a scattering profile");
    }

    double prev = p.value(0.0);
    bool strict_ok = true, nonincr_ok = true;
    for (int i = 1; i <= n; ++i) {
        const double r = R * i / (n + 1.0); // stay strictly inside the support
        const double v = p.value(r);
        if (v >= prev) strict_ok = false;
        if (v > prev + 1e-14 * scale) nonincr_ok = false;
        prev = v;
    }
    if (role == ProfileRole::Scattering && !strict_ok) {
        rep.monotone = false;
        rep.violations.push_back("profile is not strictly decreasing on [0, support]");
    }
    if (role == ProfileRole::MeanField && !nonincr_ok) {
        rep.monotone = false;
        rep.violations.push_back("profile is not non-increasing on [0, support]");
    }

    const double edge = p.value(R * (1.0 - 1e-9));
    if (std::abs(edge) > 1e-7 * scale) {
        rep.vanishes_at_support = false;
        rep.violations.push_back("profile does not vanish at the support radius");
    }

    const double dedge = p.deriv(R * (1.0 - 1e-9));
    if (std::abs(dedge) > 1e-6 * scale / R) {
        rep.derivative_vanishes_at_support = false;
        rep.violations.push_back("first derivative jumps at the support radius");
    }

    // finite-difference second derivative on an interior grid
    const double h = R * 1e-4;
    double max_fd2 = 0.0;
    for (int i = 1; i < 200; ++i) {
        const double r = R * i / 200.0;
        if (r - h <= 0.0 || r + h >= R) continue;
        const double fd2 = (p.value(r + h) - 2.0 * p.value(r) + p.value(r - h)) / (h * h);
        max_fd2 = std::max(max_fd2, std::abs(fd2));
    }
    if (!(max_fd2 < 1e6 * scale / (R * R)) || !std::isfinite(max_fd2)) {
        rep.second_derivative_bounded = false;
        rep.violations.push_back("finite-difference second derivative is unbounded");
    }
    return rep;
}

/// One obstacle's scattering energy eps^alpha U(|x-c| / eps).
inline double scattering_energy(const Vec& x, const Vec& c, const ScalingParams& params,
                                const RadialPotential& U) {
    const double r = norm(x - c);
    if (r >= params.epsilon) return 0.0;
    return std::pow(params.epsilon, params.alpha) * U.value(r / params.epsilon);
}

/// Everything needed to evaluate the right-hand side of the equations of
/// motion against one quenched configuration.
struct ForceFieldContext {
    const ObstacleConfiguration* config = nullptr;
    const SpatialIndex* index = nullptr;
    const RadialPotential* scattering = nullptr;  // U, support 1 before scaling
    const RadialPotential* mean_field = nullptr;  // Lambda, may be null
    ScalingParams params;
    double mu = 0.0;  // 1/mu normalises the mean-field sum

    double interaction_radius() const { return params.epsilon; }
    double mean_field_radius() const { return mean_field ? mean_field->support() : 0.0; }
    double query_radius() const { return std::max(interaction_radius(), mean_field_radius()); }
};

inline ForceFieldContext make_force_context(const ObstacleConfiguration& cfg,
                                            const SpatialIndex& index, const RadialPotential& U,
                                            const RadialPotential* lambda,
                                            const ScalingParams& params) {
    ForceFieldContext ctx;
    ctx.config = &cfg;
    ctx.index = &index;
    ctx.scattering = &U;
    ctx.mean_field = lambda;
    ctx.params = params;
    ctx.mu = cfg.intensity;
    if (index.cell_size() < ctx.query_radius() * (1.0 - 1e-12))
        throw spec_error("ForceFieldContext: index cell size below max(eps, supp Lambda)");
    return ctx;
}

/// Acceleration on a unit-mass particle:
///   -sum_near eps^{alpha-1} U'(|x-c|/eps) (x-c)/|x-c|
///   -(1/mu)  sum_near Lambda'(|x-c|)     (x-c)/|x-c|.
/// A centre coinciding with x contributes nothing (radial smoothness forces
/// profile'(0) = 0).
inline Vec total_force(const Vec& x, const ForceFieldContext& ctx) {
    Vec f{};
    if (ctx.config->size() == 0) return f;
    const double eps = ctx.params.epsilon;
    const double rU = ctx.interaction_radius();
    const double rL = ctx.mean_field_radius();
    const auto near = ctx.index->query(*ctx.config, x, std::max(rU, rL));
    const double kick = std::pow(eps, ctx.params.alpha - 1.0);
    const bool with_lambda = ctx.mean_field && ctx.mu > 0.0;
    for (int i : near) {
        const Vec d = ctx.index->displacement(ctx.config->centers[static_cast<std::size_t>(i)], x);
        const double r = norm(d);
        if (r == 0.0) continue;
        if (r < rU) {
            const double du = ctx.scattering->deriv(r / eps);
            if (du != 0.0) f -= (kick * du / r) * d;
        }
        if (with_lambda && r < rL) {
            const double dl = ctx.mean_field->deriv(r);
            if (dl != 0.0) f -= (dl / (ctx.mu * r)) * d;
        }
    }
    return f;
}

/// Potential part of the Hamiltonian at x (scattering + mean-field).
inline double potential_energy(const Vec& x, const ForceFieldContext& ctx) {
    if (ctx.config->size() == 0) return 0.0;
    const double eps = ctx.params.epsilon;
    const double rU = ctx.interaction_radius();
    const double rL = ctx.mean_field_radius();
    const auto near = ctx.index->query(*ctx.config, x, std::max(rU, rL));
    const double amp = std::pow(eps, ctx.params.alpha);
    const bool with_lambda = ctx.mean_field && ctx.mu > 0.0;
    double e = 0.0;
    for (int i : near) {
        const double r =
            norm(ctx.index->displacement(ctx.config->centers[static_cast<std::size_t>(i)], x));
        if (r < rU) e += amp * ctx.scattering->value(r / eps);
        if (with_lambda && r < rL) e += ctx.mean_field->value(r) / ctx.mu;
    }
    return e;
}

namespace detail {

/// Angular measure factors of the sphere of radius r about x clipped to a
/// ball of radius rb at distance s: full measure, the inside fraction, and
/// the first direction moment (toward the ball centre).
struct BallOverlap {
    double measure;  // length (d=2) or area (d=3) of the clipped sphere
    double moment;   // integral of cos(psi) over the clipped sphere
};

inline BallOverlap ball_overlap(int dim, double r, double s, double rb) {
    BallOverlap o{0.0, 0.0};
    if (r <= 0.0) return o;
    if (s + r <= rb) {  // fully inside
        o.measure = dim == 2 ? 2.0 * std::numbers::pi * r : 4.0 * std::numbers::pi * r * r;
        return o;
    }
    if (r >= s + rb || r + rb <= s) return o;  // fully outside
    const double tau = std::clamp((s * s + r * r - rb * rb) / (2.0 * r * s), -1.0, 1.0);
    if (dim == 2) {
        const double psi = std::acos(tau);
        o.measure = 2.0 * psi * r;
        o.moment = 2.0 * std::sin(psi) * r;
    } else {
        o.measure = 2.0 * std::numbers::pi * r * r * (1.0 - tau);
        o.moment = std::numbers::pi * r * r * (1.0 - tau * tau);
    }
    return o;
}

} // namespace detail

/// Limiting mean-field potential Phi(x) = integral over the region of
/// Lambda(x - c) dc. Ball regions use the radial overlap decomposition;
/// boxes use iterated adaptive quadrature.
inline double limit_potential(const Vec& x, const Region& region, const RadialPotential& lam,
                              double abs_tol = 1e-8) {
    const double RL = lam.support();
    if (region.kind() == Region::Kind::Ball) {
        const double s = norm(x - region.center());
        const double rb = region.radius();
        if (s - rb >= RL) return 0.0;
        const double r_hi = std::min(RL, s + rb);
        // smooth pieces split at the contact radii
        std::vector<double> cuts{0.0, r_hi};
        const double c1 = std::abs(s - rb);
        if (c1 > 0.0 && c1 < r_hi) cuts.push_back(c1);
        std::sort(cuts.begin(), cuts.end());
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            total += integrate(
                [&](double r) {
                    return lam.value(r) * detail::ball_overlap(region.dim(), r, s, rb).measure;
                },
                cuts[i], cuts[i + 1], abs_tol / 2.0);
        return total;
    }
    // box: clip the integration domain to the reach of Lambda
    Vec lo = region.lo(), hi = region.hi();
    for (int a = 0; a < region.dim(); ++a) {
        lo[a] = std::max(lo[a], x[a] - RL);
        hi[a] = std::min(hi[a], x[a] + RL);
        if (!(hi[a] > lo[a])) return 0.0;
    }
    return integrate_box([&](const Vec& c) { return lam.value(norm(x - c)); }, lo, hi,
                         region.dim(), abs_tol);
}

/// grad Phi(x) = integral over the region of grad Lambda(x - c) dc.
inline Vec limit_force(const Vec& x, const Region& region, const RadialPotential& lam,
                       double abs_tol = 1e-8) {
    const double RL = lam.support();
    Vec g{};
    if (region.kind() == Region::Kind::Ball) {
        const double s = norm(x - region.center());
        const double rb = region.radius();
        if (s - rb >= RL || s == 0.0) return g;  // zero by symmetry at the centre
        const double r_hi = std::min(RL, s + rb);
        std::vector<double> cuts{0.0, r_hi};
        const double c1 = std::abs(s - rb);
        if (c1 > 0.0 && c1 < r_hi) cuts.push_back(c1);
        std::sort(cuts.begin(), cuts.end());
        double along = 0.0;  // component toward x - center
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            along += integrate(
                [&](double r) {
                    return -lam.deriv(r) * detail::ball_overlap(region.dim(), r, s, rb).moment;
                },
                cuts[i], cuts[i + 1], abs_tol / 2.0);
        return (along / s) * (x - region.center());
    }
    Vec lo = region.lo(), hi = region.hi();
    for (int a = 0; a < region.dim(); ++a) {
        lo[a] = std::max(lo[a], x[a] - RL);
        hi[a] = std::min(hi[a], x[a] + RL);
        if (!(hi[a] > lo[a])) return g;
    }
    for (int a = 0; a < region.dim(); ++a) {
        g[a] = integrate_box(
            [&](const Vec& c) {
                const Vec d = x - c;
                const double r = norm(d);
                if (r < 1e-14) return 0.0;
                return lam.deriv(r) * d[a] / r;
            },
            lo, hi, region.dim(), abs_tol);
    }
    return g;
}

} // namespace lorentz
