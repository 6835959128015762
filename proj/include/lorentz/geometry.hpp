#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "lorentz/errors.hpp"

namespace lorentz {

/// Small d-vector for d in {2,3}. Components beyond the active dimension
/// stay exactly zero, so norms and dot products can run over all three slots.
struct Vec {
    std::array<double, 3> c{0.0, 0.0, 0.0};

    double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

    Vec& operator+=(const Vec& o) {
        c[0] += o.c[0]; c[1] += o.c[1]; c[2] += o.c[2];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        c[0] -= o.c[0]; c[1] -= o.c[1]; c[2] -= o.c[2];
        return *this;
    }
    Vec& operator*=(double s) {
        c[0] *= s; c[1] *= s; c[2] *= s;
        return *this;
    }
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator*(Vec a, double s) { return a *= s; }
inline Vec operator*(double s, Vec a) { return a *= s; }

inline double dot(const Vec& a, const Vec& b) {
    return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2];
}
inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline Vec make_vec(double x, double y) { return Vec{{x, y, 0.0}}; }
inline Vec make_vec(double x, double y, double z) { return Vec{{x, y, z}}; }

/// Rotate the planar part of v counterclockwise by angle (radians).
inline Vec rotate2(const Vec& v, double angle) {
    const double ca = std::cos(angle), sa = std::sin(angle);
    return Vec{{ca * v[0] - sa * v[1], sa * v[0] + ca * v[1], 0.0}};
}

/// Bounded sampling region: axis-aligned box or ball, with closed-form volume.
class Region {
  public:
    enum class Kind { Box, Ball };

    static Region box(int dim, const Vec& lo, const Vec& hi, bool periodic = false) {
        Region r;
        r.dim_ = dim;
        r.kind_ = Kind::Box;
        r.lo_ = lo;
        r.hi_ = hi;
        r.periodic_ = periodic;
        for (int i = 0; i < dim; ++i)
            if (!(hi[i] > lo[i])) throw spec_error("Region::box: empty extent on axis " + std::to_string(i));
        return r;
    }

    static Region ball(int dim, const Vec& center, double radius) {
        if (!(radius > 0.0)) throw spec_error("Region::ball: radius must be positive");
        Region r;
        r.dim_ = dim;
        r.kind_ = Kind::Ball;
        r.center_ = center;
        r.radius_ = radius;
        return r;
    }

    int dim() const { return dim_; }
    Kind kind() const { return kind_; }
    bool periodic() const { return periodic_; }
    const Vec& lo() const { return lo_; }
    const Vec& hi() const { return hi_; }
    const Vec& center() const { return center_; }
    double radius() const { return radius_; }

    double volume() const {
        if (kind_ == Kind::Box) {
            double v = 1.0;
            for (int i = 0; i < dim_; ++i) v *= hi_[i] - lo_[i];
            return v;
        }
        const double pi = std::numbers::pi;
        return dim_ == 2 ? pi * radius_ * radius_
                         : 4.0 / 3.0 * pi * radius_ * radius_ * radius_;
    }

    /// Closed-set membership.
    bool contains(const Vec& p) const {
        if (kind_ == Kind::Box) {
            for (int i = 0; i < dim_; ++i)
                if (p[i] < lo_[i] || p[i] > hi_[i]) return false;
            return true;
        }
        return norm(p - center_) <= radius_;
    }

    /// Signed distance to the boundary: positive inside, negative outside.
    double boundary_distance(const Vec& p) const {
        if (kind_ == Kind::Ball) return radius_ - norm(p - center_);
        double d = std::numeric_limits<double>::infinity();
        bool inside = true;
        for (int i = 0; i < dim_; ++i) {
            d = std::min(d, std::min(p[i] - lo_[i], hi_[i] - p[i]));
            inside = inside && p[i] >= lo_[i] && p[i] <= hi_[i];
        }
        if (inside) return d;
        // outside: distance to the box, negated
        double s2 = 0.0;
        for (int i = 0; i < dim_; ++i) {
            const double e = std::max({lo_[i] - p[i], 0.0, p[i] - hi_[i]});
            s2 += e * e;
        }
        return -std::sqrt(s2);
    }

    /// Axis-aligned bounding box as (lo, hi).
    std::pair<Vec, Vec> bounding_box() const {
        if (kind_ == Kind::Box) return {lo_, hi_};
        Vec lo, hi;
        for (int i = 0; i < dim_; ++i) {
            lo[i] = center_[i] - radius_;
            hi[i] = center_[i] + radius_;
        }
        return {lo, hi};
    }

    template <class Rng>
    Vec sample_uniform(Rng& rng) const {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        if (kind_ == Kind::Box) {
            Vec p;
            for (int i = 0; i < dim_; ++i) p[i] = lo_[i] + (hi_[i] - lo_[i]) * u(rng);
            return p;
        }
        // rejection from the bounding box; acceptance >= pi/4 in d=2, pi/6 in d=3
        for (;;) {
            Vec p;
            for (int i = 0; i < dim_; ++i) p[i] = center_[i] + radius_ * (2.0 * u(rng) - 1.0);
            if (norm(p - center_) <= radius_) return p;
        }
    }

  private:
    int dim_ = 2;
    Kind kind_ = Kind::Box;
    Vec lo_{}, hi_{};
    Vec center_{};
    double radius_ = 0.0;
    bool periodic_ = false;
};

} // namespace lorentz
