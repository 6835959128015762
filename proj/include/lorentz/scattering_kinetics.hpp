#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lorentz/errors.hpp"
#include "lorentz/potentials_forces.hpp"
#include "lorentz/quadrature.hpp"
#include "lorentz/rng.hpp"
#include "lorentz/spherical_field.hpp"

namespace lorentz {

struct DeflectionResult {
    double theta = 0.0;             // deflection magnitude, [0, pi]
    bool weak_coupling_ok = true;   // false once theta leaves the grazing regime
};

namespace detail {

/// Radial energy factor q(r) = 1 - rho^2/r^2 - 2 W(r)/speed^2 with
/// W = coupling * U. The closest approach is the outermost root of q.
struct RadialProblem {
    double rho, speed, coupling;
    const RadialPotential* U;

    double q(double r) const {
        const double w = coupling * U->value(r);
        return 1.0 - rho * rho / (r * r) - 2.0 * w / (speed * speed);
    }
    double dq(double r) const {
        return 2.0 * rho * rho / (r * r * r) -
               2.0 * coupling * U->deriv(r) / (speed * speed);
    }
};

inline double outermost_root(const RadialProblem& p) {
    // q(1) = 1 - rho^2 >= 0 and q(rho) = -2W(rho)/s^2 < 0 inside the support,
    // so a bracket exists in [rho, 1]. Scan from the outside in.
    const int n = 512;
    double hi = 1.0, qhi = p.q(1.0);
    for (int i = 1; i <= n; ++i) {
        const double r = 1.0 + (p.rho - 1.0) * static_cast<double>(i) / n;
        const double qr = p.q(r);
        if (qr <= 0.0) {
            double lo = r;
            for (int it = 0; it < 128; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (p.q(mid) <= 0.0)
                    lo = mid;
                else
                    hi = mid;
                if (hi - lo < 1e-15 * hi) break;
            }
            return hi;
        }
        hi = r;
        qhi = qr;
    }
    (void)qhi;
    throw numeric_guard_error("deflection_angle: no turning point found in [rho, 1]");
}

} // namespace detail

/// Classical deflection angle of one complete soft collision:
///   theta = pi - 2 rho Int_{r_min}^{1} dr / (r^2 sqrt(q(r))) - 2 asin(rho).
/// The endpoint inverse-square-root singularity is removed by the
/// substitution r = r_min + (1 - r_min) t^2.
inline DeflectionResult deflection_angle(double rho, double speed, double coupling,
                                         const RadialPotential& U) {
    if (!(speed > 0.0)) throw spec_error("deflection_angle: speed must be positive");
    if (coupling < 0.0) throw spec_error("deflection_angle: coupling must be >= 0");
    if (rho < 0.0 || rho > 1.0) throw spec_error("deflection_angle: rho must lie in [0,1]");

    DeflectionResult out;
    if (coupling == 0.0 || rho >= 1.0) return out;

    const bool above_barrier = 0.5 * speed * speed > coupling * U.value_at_zero();
    if (rho == 0.0) {
        // head-on: straight passage above the barrier, reflection below
        if (above_barrier) return out;
        out.theta = std::numbers::pi;
        out.weak_coupling_ok = false;
        return out;
    }

    const detail::RadialProblem prob{rho, speed, coupling, &U};
    const double rmin = detail::outermost_root(prob);
    const double qp = prob.dq(rmin);
    if (!(qp > 0.0))
        throw numeric_guard_error("deflection_angle: degenerate turning point (orbiting)");

    const double span = 1.0 - rmin;
    double integral = 0.0;
    if (span > 0.0) {
        const double limit0 = 2.0 * rho * std::sqrt(span) / (rmin * rmin * std::sqrt(qp));
        integral = integrate(
            [&](double t) {
                const double r = rmin + span * t * t;
                const double q = prob.q(r);
                if (q <= 0.0) return limit0;
                return 2.0 * rho * span * t / (r * r * std::sqrt(q));
            },
            0.0, 1.0, 1e-10);
    }
    double theta = std::numbers::pi - 2.0 * integral - 2.0 * std::asin(rho);
    theta = std::clamp(theta, 0.0, std::numbers::pi);
    out.theta = theta;
    out.weak_coupling_ok = theta <= 0.5 * std::numbers::pi;
    return out;
}

/// Deflection angles theta(rho) tabulated on a Chebyshev grid in [0,1] with
/// both endpoints appended, plus shape-preserving (PCHIP) interpolation.
class ScatteringTable {
  public:
    ScatteringTable(std::vector<double> rho, std::vector<double> theta, double speed,
                    double coupling, std::string potential_id)
        : rho_(std::move(rho)),
          theta_(std::move(theta)),
          speed_(speed),
          coupling_(coupling),
          potential_id_(std::move(potential_id)) {
        if (rho_.size() != theta_.size() || rho_.size() < 2)
            throw spec_error("ScatteringTable: need matching rho/theta arrays");
        build_slopes();
    }

    double theta_at(double rho) const {
        const double r = std::min(std::abs(rho), 1.0);
        if (r <= rho_.front()) return theta_.front();
        if (r >= rho_.back()) return theta_.back();
        std::size_t lo = 0, hi = rho_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (rho_[mid] <= r ? lo : hi) = mid;
        }
        const double h = rho_[lo + 1] - rho_[lo];
        const double t = (r - rho_[lo]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * theta_[lo] + (t3 - 2 * t2 + t) * h * slope_[lo] +
               (-2 * t3 + 3 * t2) * theta_[lo + 1] + (t3 - t2) * h * slope_[lo + 1];
    }

    double max_theta() const {
        double m = 0.0;
        for (double t : theta_) m = std::max(m, t);
        return m;
    }

    const std::vector<double>& rho_grid() const { return rho_; }
    const std::vector<double>& theta_grid() const { return theta_; }
    double speed() const { return speed_; }
    double coupling() const { return coupling_; }
    const std::string& potential_id() const { return potential_id_; }

  private:
    void build_slopes() {
        // Fritsch-Carlson monotone cubic slopes; flat segments get zero slope
        const std::size_t n = rho_.size();
        slope_.assign(n, 0.0);
        std::vector<double> d(n - 1), h(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = rho_[i + 1] - rho_[i];
            d[i] = (theta_[i + 1] - theta_[i]) / h[i];
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0) {
                slope_[i] = 0.0;
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                slope_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        auto endpoint = [](double h0, double h1, double d0, double d1) {
            double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if (m * d0 <= 0.0)
                m = 0.0;
            else if (d0 * d1 < 0.0 && std::abs(m) > 3.0 * std::abs(d0))
                m = 3.0 * d0;
            return m;
        };
        slope_.front() = n > 2 ? endpoint(h[0], h[1], d[0], d[1]) : d[0];
        slope_.back() = n > 2 ? endpoint(h[n - 2], h[n - 3], d[n - 2], d[n - 3]) : d[n - 2];
    }

    std::vector<double> rho_, theta_, slope_;
    double speed_, coupling_;
    std::string potential_id_;
};

inline ScatteringTable build_scattering_table(const RadialPotential& U, double speed,
                                              double coupling, int n_grid) {
    if (n_grid < 64) throw spec_error("build_scattering_table: n_grid must be >= 64");
    std::vector<double> rho;
    rho.push_back(0.0);
    for (int j = n_grid - 1; j >= 0; --j)
        rho.push_back(0.5 * (1.0 + std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * n_grid))));
    rho.push_back(1.0);

    std::vector<double> theta(rho.size());
    bool any_reflection = false;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        try {
            const DeflectionResult r = deflection_angle(rho[i], speed, coupling, U);
            theta[i] = r.theta;
            any_reflection = any_reflection || !r.weak_coupling_ok;
        } catch (const numeric_guard_error& e) {
            throw numeric_guard_error("build_scattering_table: node rho=" +
                                      std::to_string(rho[i]) + ": " + e.what());
        }
    }

    // guard against silent root-finder failures: a jump an order of magnitude
    // above both neighbouring increments cannot come from a smooth theta(rho)
    if (!any_reflection) {
        for (std::size_t i = 1; i + 2 < rho.size(); ++i) {
            const double jump = std::abs(theta[i + 1] - theta[i]);
            const double nb = std::max(std::abs(theta[i] - theta[i - 1]),
                                       std::abs(theta[i + 2] - theta[i + 1]));
            if (jump > 10.0 * nb + 1e-6)
                throw numeric_guard_error("build_scattering_table: discontinuity near rho=" +
                                          std::to_string(rho[i]));
        }
    }
    return ScatteringTable(std::move(rho), std::move(theta), speed, coupling, U.id());
}

inline void write_scattering_table_csv(const ScatteringTable& t, std::ostream& out) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "# potential=%s speed=%.17g coupling=%.17g\n",
                  t.potential_id().c_str(), t.speed(), t.coupling());
    out << buf << "rho,theta\n";
    for (std::size_t i = 0; i < t.rho_grid().size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t.rho_grid()[i], t.theta_grid()[i]);
        out << buf;
    }
}

struct LandauCoefficient {
    double value = 0.0;
    bool expansion_valid = true;  // false if any tabulated theta exceeds pi/2
};

/// B = (speed eps^{-2 alpha} / 2) Int_{-1}^{1} 4 speed^2 sin^2(theta(|rho|)/2) drho.
/// Integrated segment-by-segment so the piecewise-cubic interpolant is
/// resolved exactly.
inline LandauCoefficient landau_coefficient_B(const ScatteringTable& table, double speed,
                                              double epsilon, double alpha) {
    const double coupling = std::pow(epsilon, alpha);
    if (std::abs(coupling - table.coupling()) > 1e-9 * std::max(1.0, coupling))
        throw spec_error("landau_coefficient_B: table coupling does not match eps^alpha");
    const auto& grid = table.rho_grid();
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        integral += integrate(
            [&](double rho) {
                const double s = std::sin(0.5 * table.theta_at(rho));
                return 4.0 * speed * speed * s * s;
            },
            grid[i], grid[i + 1], 1e-8 / static_cast<double>(grid.size()));
    LandauCoefficient out;
    // the even integrand doubles the [0,1] integral; the 1/2 prefactor cancels it
    out.value = speed * std::pow(epsilon, -2.0 * alpha) * integral;
    out.expansion_valid = table.max_theta() <= 0.5 * std::numbers::pi;
    return out;
}

/// Grazing limit B* = lim_{eps->0} B(eps), by Richardson-style fit of
/// B(b) = B* + c1 b + c2 b^2 over a geometric ladder of couplings b.
inline double landau_limit_B(const RadialPotential& U, double speed, int n_grid = 128) {
    const double b0 = 0.025 * speed * speed / std::max(U.value_at_zero(), 1e-300);
    const int n = 5;
    std::vector<double> b(n), Bb(n);
    for (int k = 0; k < n; ++k) {
        b[static_cast<std::size_t>(k)] = b0 * std::pow(0.5, k);
        const ScatteringTable t =
            build_scattering_table(U, speed, b[static_cast<std::size_t>(k)], n_grid);
        // landau_coefficient_B with eps^alpha = b; alpha drops out of the limit
        const auto& grid = t.rho_grid();
        double integral = 0.0;
        for (std::size_t i = 0; i + 1 < grid.size(); ++i)
            integral += integrate(
                [&](double rho) {
                    const double s = std::sin(0.5 * t.theta_at(rho));
                    return 4.0 * speed * speed * s * s;
                },
                grid[i], grid[i + 1], 1e-12);
        Bb[static_cast<std::size_t>(k)] =
            speed * integral / (b[static_cast<std::size_t>(k)] * b[static_cast<std::size_t>(k)]);
    }
    // least squares for [B*, c1, c2] against 1, b, b^2
    double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double rhs[3] = {0, 0, 0};
    for (int k = 0; k < n; ++k) {
        const double bk = b[static_cast<std::size_t>(k)];
        const double phi[3] = {1.0, bk, bk * bk};
        for (int i = 0; i < 3; ++i) {
            rhs[i] += phi[i] * Bb[static_cast<std::size_t>(k)];
            for (int j = 0; j < 3; ++j) m[i][j] += phi[i] * phi[j];
        }
    }
    // 3x3 Gaussian elimination
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        std::swap(m[col], m[piv]);
        std::swap(rhs[col], rhs[piv]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = m[r][col] / m[col][col];
            for (int c = col; c < 3; ++c) m[r][c] -= f * m[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    return rhs[0] / m[0][0];
}

/// Unit vector omega with v' = v - 2 (omega.v) omega deflected by theta from
/// v. In the plane the rotation sense follows the sign of rho; in d=3 the
/// scattering plane azimuth is drawn from the supplied engine.
template <class Rng>
Vec scattering_direction(const Vec& v, double rho_signed, double theta, int dim, Rng& azimuth) {
    const double s = norm(v);
    if (!(s > 0.0)) throw spec_error("scattering_direction: zero velocity");
    const Vec vhat = v * (1.0 / s);
    if (dim == 2) {
        const double sigma = rho_signed >= 0.0 ? 1.0 : -1.0;
        const double gamma = 0.5 * sigma * theta - 0.5 * std::numbers::pi;
        const Vec perp = make_vec(-vhat[1], vhat[0]);
        return std::cos(gamma) * vhat + std::sin(gamma) * perp;
    }
    // orthonormal frame transverse to v
    const Vec a = std::abs(vhat[0]) < 0.9 ? make_vec(1, 0, 0) : make_vec(0, 1, 0);
    Vec e1 = a - dot(a, vhat) * vhat;
    e1 *= 1.0 / norm(e1);
    const Vec e2 = make_vec(vhat[1] * e1[2] - vhat[2] * e1[1], vhat[2] * e1[0] - vhat[0] * e1[2],
                            vhat[0] * e1[1] - vhat[1] * e1[0]);
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    const double beta = u(azimuth);
    return std::sin(0.5 * theta) * vhat +
           std::cos(0.5 * theta) * (std::cos(beta) * e1 + std::sin(beta) * e2);
}

inline Vec scattering_direction(const Vec& v, double rho_signed, double theta, int dim,
                                std::uint64_t azimuth_seed) {
    std::mt19937_64 rng = stream_engine(azimuth_seed, 7);
    return scattering_direction(v, rho_signed, theta, dim, rng);
}

inline Vec reflect(const Vec& v, const Vec& omega) { return v - 2.0 * dot(omega, v) * omega; }

struct KineticParticle {
    Vec x{}, v{};
    double clock = 0.0;  // time of the next collision
};

struct KineticPath {
    std::vector<double> times;
    std::vector<Vec> x;
    std::vector<Vec> v;
    long collisions = 0;
    double max_speed_drift = 0.0;
};

struct JumpProcessOptions {
    std::function<Vec(const Vec&)> mean_field_force;  // grad Phi, optional
    double transport_dt = 0.0;                        // substep when a mean field is active
};

/// Linear Boltzmann jump process: free transport x' = transport_scale v with
/// an optional Vlasov drift, and collisions at rate 2 collision_scale speed
/// from an exponential clock; at each epoch rho is drawn (uniform on [-1,1]
/// in d=2; |rho| with density 2 rho and a uniform azimuth in d=3) and the
/// velocity reflects by theta(|rho|) from the table.
inline KineticPath boltzmann_jump_evolve(const KineticParticle& p0, double T,
                                         const std::vector<double>& sample_times,
                                         const ScatteringTable& table, double transport_scale,
                                         double collision_scale, int dim, double speed,
                                         std::uint64_t seed, const JumpProcessOptions& opts = {}) {
    if (!(transport_scale > 0.0) || !(collision_scale > 0.0))
        throw spec_error("boltzmann_jump_evolve: scales must be positive");
    if (std::abs(norm(p0.v) - speed) > 1e-9 * speed)
        throw spec_error("boltzmann_jump_evolve: initial velocity off the sphere");

    std::mt19937_64 rng = stream_engine(seed, 1);
    std::exponential_distribution<double> exp_clock(2.0 * collision_scale * speed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    KineticPath path;
    KineticParticle p = p0;
    double t = 0.0;
    std::size_t next_sample = 0;

    const bool with_field = static_cast<bool>(opts.mean_field_force);
    const double dt_mf = opts.transport_dt;
    if (with_field && !(dt_mf > 0.0))
        throw spec_error("boltzmann_jump_evolve: mean field requires transport_dt");

    auto transport = [&](double dt) {
        if (dt <= 0.0) return;
        if (!with_field) {
            p.x += (transport_scale * dt) * p.v;
            return;
        }
        double left = dt;
        while (left > 1e-15 * T) {
            const double h = std::min(dt_mf, left);
            // half-kick, drift, half-kick against -transport_scale * grad Phi,
            // then projection back onto the speed sphere
            Vec f = opts.mean_field_force(p.x) * (-transport_scale);
            p.v += (0.5 * h) * f;
            p.x += (transport_scale * h) * p.v;
            f = opts.mean_field_force(p.x) * (-transport_scale);
            p.v += (0.5 * h) * f;
            const double sp = norm(p.v);
            if (std::abs(sp - speed) > 1e-9 * speed)
                throw numeric_guard_error(
                    "boltzmann_jump_evolve: mean-field step changed |v| beyond tolerance");
            p.v *= speed / sp;
            left -= h;
        }
    };

    auto record_until = [&](double t_target) {
        while (next_sample < sample_times.size() && sample_times[next_sample] <= t_target + 1e-15) {
            const double ts = sample_times[next_sample];
            // between collisions the free path is linear in time
            KineticParticle q = p;
            if (!with_field) {
                q.x += (transport_scale * (ts - t)) * q.v;
            } else {
                // substepped drift to the sample time
                const KineticParticle save = p;
                transport(ts - t);
                q = p;
                p = save;
            }
            path.times.push_back(ts);
            path.x.push_back(q.x);
            path.v.push_back(q.v);
            ++next_sample;
        }
    };

    p.clock = exp_clock(rng);
    while (t < T) {
        const double t_next = std::min(T, t + p.clock);
        record_until(t_next);
        transport(t_next - t);
        p.clock -= t_next - t;
        t = t_next;
        if (t >= T) break;
        // collision epoch
        double rho;
        if (dim == 2) {
            rho = 2.0 * uni(rng) - 1.0;
        } else {
            rho = std::sqrt(uni(rng));  // |impact| with density 2 rho on [0,1]
        }
        const double theta = table.theta_at(std::abs(rho));
        const Vec omega = scattering_direction(p.v, rho, theta, dim, rng);
        p.v = reflect(p.v, omega);
        path.collisions += 1;
        path.max_speed_drift = std::max(path.max_speed_drift, std::abs(norm(p.v) - speed));
        p.clock = exp_clock(rng);
    }
    record_until(T);
    path.max_speed_drift = std::max(path.max_speed_drift, std::abs(norm(p.v) - speed));
    return path;
}

/// Spherical Brownian motion with generator B Laplace-Beltrami: tangent
/// Gaussian increment of covariance 2 B dt per tangent direction, then exact
/// renormalisation to the sphere. Weak order one.
inline KineticPath landau_sde_evolve(const Vec& v0, double B, double T, double dt,
                                     std::uint64_t seed, int dim) {
    if (B < 0.0) throw spec_error("landau_sde_evolve: B must be >= 0");
    const double speed = norm(v0);
    if (!(speed > 0.0)) throw spec_error("landau_sde_evolve: zero initial speed");
    if (B > 0.0 && dt > 0.01 * speed * speed / ((dim - 1) * B) * (1.0 + 1e-12))
        throw spec_error("landau_sde_evolve: dt too large for the relaxation time");

    std::mt19937_64 rng = stream_engine(seed, 2);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const long n = static_cast<long>(std::floor(T / dt + 1e-9));
    KineticPath path;
    path.times.reserve(static_cast<std::size_t>(n) + 1);
    path.v.reserve(static_cast<std::size_t>(n) + 1);
    Vec v = v0;
    path.times.push_back(0.0);
    path.v.push_back(v);
    const double amp = std::sqrt(2.0 * B * dt);
    for (long k = 1; k <= n; ++k) {
        if (B > 0.0) {
            if (dim == 2) {
                const Vec tangent = make_vec(-v[1] / speed, v[0] / speed);
                v += (amp * gauss(rng)) * tangent;
            } else {
                Vec xi = make_vec(gauss(rng), gauss(rng), gauss(rng));
                const Vec vhat = v * (1.0 / speed);
                xi -= dot(xi, vhat) * vhat;
                v += amp * xi;
            }
            v *= speed / norm(v);
        }
        path.times.push_back(static_cast<double>(k) * dt);
        path.v.push_back(v);
        path.max_speed_drift = std::max(path.max_speed_drift, std::abs(norm(v) - speed));
    }
    return path;
}

/// Multiply spectral modes by the Landau eigenvalues B * (-k^2 / speed^2)
/// (d=2) or B * (-l(l+1)/speed^2) (d=3).
inline SphericalField apply_landau(const SphericalField& f, double B) {
    SphericalField out = f;
    auto& c = out.coefficients();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= B * f.laplace_eigenvalue(i);
    return out;
}

/// exp(t B_eff Laplace-Beltrami) applied mode-wise; the exact semigroup of
/// apply_landau with B_eff folded in (e.g. eta^{2 delta} B).
inline SphericalField landau_semigroup(const SphericalField& f, double B_eff, double t) {
    SphericalField out = f;
    auto& c = out.coefficients();
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] *= std::exp(B_eff * f.laplace_eigenvalue(i) * t);
    return out;
}

/// (L f)(v) = speed eps^{-2 alpha} Int_{-1}^{1} { f(v'(rho)) - f(v) } drho,
/// evaluated by fixed quadrature at synthesis points and re-analysed.
/// Planar (d=2) only; deflection by theta(|rho|) with the rotation sense of
/// sign(rho) makes the integrand even in rho.
inline SphericalField apply_boltzmann(const SphericalField& f, const ScatteringTable& table,
                                      double epsilon, double alpha) {
    if (f.dim() != 2)
        throw spec_error("apply_boltzmann: the planar impact-parameter measure is d=2 only");
    const double speed = f.speed();
    const int K = f.max_degree();
    const int n = 4 * K + 8;
    const double rate = speed * std::pow(epsilon, -2.0 * alpha);

    const auto& grid = table.rho_grid();
    const GaussRule& rule = gauss_legendre(12);

    std::vector<Complex> lf(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double phi = 2.0 * std::numbers::pi * j / n;
        auto f_at = [&](double ang) {
            Complex s(0.0, 0.0);
            for (int k = -K; k <= K; ++k) s += f.mode(k) * std::polar(1.0, k * ang);
            return s;
        };
        const Complex f0 = f_at(phi);
        Complex acc(0.0, 0.0);
        for (std::size_t seg = 0; seg + 1 < grid.size(); ++seg) {
            const double mid = 0.5 * (grid[seg] + grid[seg + 1]);
            const double half = 0.5 * (grid[seg + 1] - grid[seg]);
            for (std::size_t q = 0; q < rule.x.size(); ++q) {
                const double rho = mid + half * rule.x[q];
                const double th = table.theta_at(rho);
                // +rho and -rho branches together
                acc += (rule.w[q] * half) * (f_at(phi + th) + f_at(phi - th) - 2.0 * f0);
            }
        }
        lf[static_cast<std::size_t>(j)] = rate * acc;
    }

    SphericalField out(2, speed, K);
    out.coefficients();
    for (int k = -K; k <= K; ++k) {
        Complex acc(0.0, 0.0);
        for (int j = 0; j < n; ++j)
            acc += lf[static_cast<std::size_t>(j)] *
                   std::polar(1.0, -k * (2.0 * std::numbers::pi * j / n));
        out.mode(k) = acc / static_cast<double>(n);
    }
    if (f.has_wavevector()) out.set_wavevector(f.wavevector());
    return out;
}

/// Independent check route for apply_boltzmann: L is diagonal on circular
/// modes with eigenvalue -speed eps^{-2a} Int_0^1 4 sin^2(k theta / 2) drho.
inline double boltzmann_eigenvalue(int k, const ScatteringTable& table, double epsilon,
                                   double alpha) {
    const double speed = table.speed();
    const auto& grid = table.rho_grid();
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        integral += integrate(
            [&](double rho) {
                const double s = std::sin(0.5 * k * table.theta_at(rho));
                return 4.0 * s * s;
            },
            grid[i], grid[i + 1], 1e-13);
    return -speed * std::pow(epsilon, -2.0 * alpha) * integral;
}

/// L2 sphere norm of (L - B Laplace-Beltrami) f.
inline double operator_mismatch(const SphericalField& f, const ScatteringTable& table, double B,
                                double epsilon, double alpha) {
    const SphericalField diff = apply_boltzmann(f, table, epsilon, alpha) - apply_landau(f, B);
    return diff.l2_norm();
}

} // namespace lorentz
