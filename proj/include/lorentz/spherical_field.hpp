#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "lorentz/config_scaling.hpp"
#include "lorentz/errors.hpp"
#include "lorentz/geometry.hpp"
#include "lorentz/quadrature.hpp"

namespace lorentz {

using Complex = std::complex<double>;

namespace sh {

/// Fully normalised associated Legendre values P_l^m(x) for fixed m,
/// l = m..lmax, including the 1/sqrt(4 pi) factor and no Condon-Shortley
/// phase. Stable three-term recurrence.
inline void normalized_plm(int m, int lmax, double x, std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(lmax - m + 1), 0.0);
    const double sx = std::sqrt(std::max(0.0, 1.0 - x * x));
    double pmm = std::sqrt(1.0 / (4.0 * std::numbers::pi));
    for (int k = 1; k <= m; ++k) pmm *= std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * sx;
    out[0] = pmm;
    if (lmax == m) return;
    double pm1 = std::sqrt(2.0 * m + 3.0) * x * pmm;
    out[1] = pm1;
    double pm2 = pmm;
    for (int l = m + 2; l <= lmax; ++l) {
        const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
        const double b = std::sqrt(((l - 1.0) * (l - 1.0) - m * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
        const double pl = a * (x * pm1 - b * pm2);
        out[static_cast<std::size_t>(l - m)] = pl;
        pm2 = pm1;
        pm1 = pl;
    }
}

/// Real orthonormal spherical harmonic Y_{l m}(theta', phi) with the sign
/// convention m > 0 -> cos, m < 0 -> sin.
inline double real_ylm(int l, int m, double cos_theta, double phi) {
    std::vector<double> plm;
    const int am = std::abs(m);
    normalized_plm(am, l, cos_theta, plm);
    const double p = plm[static_cast<std::size_t>(l - am)];
    if (m == 0) return p;
    const double sqrt2 = std::numbers::sqrt2;
    return m > 0 ? sqrt2 * p * std::cos(am * phi) : sqrt2 * p * std::sin(am * phi);
}

} // namespace sh

/// Quadrature grid on S^{d-1}_speed; weights sum to the surface measure.
/// d=2: trapezoid in the angle (exact for trigonometric polynomials);
/// d=3: Gauss-Legendre in cos(theta) x uniform azimuth (exact for
/// band-limited fields).
struct SphereGrid {
    std::vector<Vec> points;
    std::vector<double> weights;
    int dim = 2;
    double speed = 1.0;
};

inline SphereGrid make_sphere_grid(int dim, double speed, int resolution) {
    SphereGrid g;
    g.dim = dim;
    g.speed = speed;
    if (dim == 2) {
        const int n = std::max(resolution, 8);
        const double w = 2.0 * std::numbers::pi * speed / n;
        for (int j = 0; j < n; ++j) {
            const double phi = 2.0 * std::numbers::pi * j / n;
            g.points.push_back(make_vec(speed * std::cos(phi), speed * std::sin(phi)));
            g.weights.push_back(w);
        }
        return g;
    }
    if (dim != 3) throw spec_error("make_sphere_grid: dim must be 2 or 3");
    const int nt = std::max(resolution, 8);
    const int np = 2 * nt + 2;
    const GaussRule& rule = gauss_legendre(nt);
    for (int i = 0; i < nt; ++i) {
        const double ct = rule.x[static_cast<std::size_t>(i)];
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        const double wt = rule.w[static_cast<std::size_t>(i)] * (2.0 * std::numbers::pi / np) *
                          speed * speed;
        for (int j = 0; j < np; ++j) {
            const double phi = 2.0 * std::numbers::pi * j / np;
            g.points.push_back(
                make_vec(speed * st * std::cos(phi), speed * st * std::sin(phi), speed * ct));
            g.weights.push_back(wt);
        }
    }
    return g;
}

/// Function on the velocity sphere in spectral form. d=2 stores circular
/// modes k = -K..K; d=3 stores real spherical-harmonic coefficients up to
/// degree L. Coefficients are complex so plane-wave profiles
/// g(x,v) = e^{i xi.x} ghat(v) fit in the same container.
class SphericalField {
  public:
    SphericalField(int dim, double speed, int max_degree)
        : dim_(dim), speed_(speed), max_degree_(max_degree) {
        if (dim != 2 && dim != 3) throw spec_error("SphericalField: dim must be 2 or 3");
        if (!(speed > 0.0)) throw spec_error("SphericalField: speed must be positive");
        if (max_degree < 0) throw spec_error("SphericalField: negative degree");
        coef_.assign(static_cast<std::size_t>(
                         dim == 2 ? 2 * max_degree + 1 : (max_degree + 1) * (max_degree + 1)),
                     Complex(0.0, 0.0));
    }

    int dim() const { return dim_; }
    double speed() const { return speed_; }
    int max_degree() const { return max_degree_; }

    bool has_wavevector() const { return has_wave_; }
    const Vec& wavevector() const { return xi_; }
    void set_wavevector(const Vec& xi) {
        xi_ = xi;
        has_wave_ = true;
    }

    /// d=2 circular mode k in [-K, K].
    Complex& mode(int k) {
        check2();
        return coef_[static_cast<std::size_t>(k + max_degree_)];
    }
    Complex mode(int k) const {
        check2();
        return coef_[static_cast<std::size_t>(k + max_degree_)];
    }

    /// d=3 real-harmonic coefficient (l, m), |m| <= l <= L.
    Complex& mode(int l, int m) {
        check3(l, m);
        return coef_[static_cast<std::size_t>(l * l + m + l)];
    }
    Complex mode(int l, int m) const {
        check3(l, m);
        return coef_[static_cast<std::size_t>(l * l + m + l)];
    }

    const std::vector<Complex>& coefficients() const { return coef_; }
    std::vector<Complex>& coefficients() { return coef_; }

    /// Laplace-Beltrami eigenvalue of flat coefficient slot i.
    double laplace_eigenvalue(std::size_t i) const {
        if (dim_ == 2) {
            const int k = static_cast<int>(i) - max_degree_;
            return -static_cast<double>(k) * k / (speed_ * speed_);
        }
        const int l = static_cast<int>(std::floor(std::sqrt(static_cast<double>(i))));
        return -static_cast<double>(l) * (l + 1) / (speed_ * speed_);
    }

    /// Synthesis at a point of the sphere.
    Complex eval(const Vec& v) const {
        if (dim_ == 2) {
            const double phi = std::atan2(v[1], v[0]);
            Complex s(0.0, 0.0);
            for (int k = -max_degree_; k <= max_degree_; ++k)
                s += mode(k) * std::polar(1.0, k * phi);
            return s;
        }
        const double ct = std::clamp(v[2] / speed_, -1.0, 1.0);
        const double phi = std::atan2(v[1], v[0]);
        Complex s(0.0, 0.0);
        for (int l = 0; l <= max_degree_; ++l)
            for (int m = -l; m <= l; ++m) {
                const Complex c = mode(l, m);
                if (c != Complex(0.0, 0.0)) s += c * sh::real_ylm(l, m, ct, phi);
            }
        return s;
    }

    double eval_real(const Vec& v) const { return eval(v).real(); }

    /// Projection of a pointwise function onto the basis by quadrature.
    static SphericalField analyze(int dim, double speed, int max_degree,
                                  const std::function<Complex(const Vec&)>& f) {
        SphericalField out(dim, speed, max_degree);
        if (dim == 2) {
            const int n = 4 * max_degree + 8;
            std::vector<Complex> samples(static_cast<std::size_t>(n));
            for (int j = 0; j < n; ++j) {
                const double phi = 2.0 * std::numbers::pi * j / n;
                samples[static_cast<std::size_t>(j)] =
                    f(make_vec(speed * std::cos(phi), speed * std::sin(phi)));
            }
            for (int k = -max_degree; k <= max_degree; ++k) {
                Complex acc(0.0, 0.0);
                for (int j = 0; j < n; ++j)
                    acc += samples[static_cast<std::size_t>(j)] *
                           std::polar(1.0, -k * (2.0 * std::numbers::pi * j / n));
                out.mode(k) = acc / static_cast<double>(n);
            }
            return out;
        }
        const SphereGrid grid = make_sphere_grid(dim, speed, 2 * max_degree + 4);
        // c_lm = (1/speed^2) * sum_i w_i f(v_i) Y_lm(v_i): unit-sphere inner product
        std::vector<Complex> acc(out.coef_.size(), Complex(0.0, 0.0));
        std::vector<double> plm;
        for (std::size_t i = 0; i < grid.points.size(); ++i) {
            const Vec& v = grid.points[i];
            const Complex fv = f(v);
            const double ct = std::clamp(v[2] / speed, -1.0, 1.0);
            const double phi = std::atan2(v[1], v[0]);
            const double w = grid.weights[i] / (speed * speed);
            for (int m = -max_degree; m <= max_degree; ++m) {
                const int am = std::abs(m);
                sh::normalized_plm(am, max_degree, ct, plm);
                const double trig = m == 0 ? 1.0
                                  : m > 0 ? std::numbers::sqrt2 * std::cos(am * phi)
                                          : std::numbers::sqrt2 * std::sin(am * phi);
                for (int l = am; l <= max_degree; ++l)
                    acc[static_cast<std::size_t>(l * l + m + l)] +=
                        fv * (w * plm[static_cast<std::size_t>(l - am)] * trig);
            }
        }
        out.coef_ = std::move(acc);
        return out;
    }

    /// Constant-mode part, i.e. K times the sphere integral.
    Complex mean() const {
        if (dim_ == 2) return mode(0);
        return mode(0, 0) / std::sqrt(4.0 * std::numbers::pi);
    }

    bool mean_zero(double tol = 1e-12) const {
        return std::abs(mean()) <= tol * std::max(1.0, l2_norm());
    }

    /// L2 norm over the sphere with its surface measure.
    double l2_norm() const {
        double s2 = 0.0;
        for (const Complex& c : coef_) s2 += std::norm(c);
        const double measure_factor =
            dim_ == 2 ? 2.0 * std::numbers::pi * speed_ : speed_ * speed_;
        return std::sqrt(measure_factor * s2);
    }

    SphericalField& operator+=(const SphericalField& o) {
        require_compatible(o);
        for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] += o.coef_[i];
        return *this;
    }
    SphericalField& operator-=(const SphericalField& o) {
        require_compatible(o);
        for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] -= o.coef_[i];
        return *this;
    }
    SphericalField& operator*=(Complex z) {
        for (Complex& c : coef_) c *= z;
        return *this;
    }

  private:
    void check2() const {
        if (dim_ != 2) throw std::logic_error("circular mode access on a d=3 field");
    }
    void check3(int l, int m) const {
        if (dim_ != 3) throw std::logic_error("harmonic access on a d=2 field");
        if (l < 0 || l > max_degree_ || std::abs(m) > l)
            throw std::out_of_range("harmonic index out of range");
    }
    void require_compatible(const SphericalField& o) const {
        if (dim_ != o.dim_ || speed_ != o.speed_ || max_degree_ != o.max_degree_)
            throw std::invalid_argument("incompatible spherical fields");
    }

    int dim_;
    double speed_;
    int max_degree_;
    std::vector<Complex> coef_;
    bool has_wave_ = false;
    Vec xi_{};
};

inline SphericalField operator+(SphericalField a, const SphericalField& b) { return a += b; }
inline SphericalField operator-(SphericalField a, const SphericalField& b) { return a -= b; }
inline SphericalField operator*(SphericalField a, Complex z) { return a *= z; }
inline SphericalField operator*(Complex z, SphericalField a) { return a *= z; }

} // namespace lorentz
