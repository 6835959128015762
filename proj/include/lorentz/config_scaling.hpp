#pragma once

#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "lorentz/errors.hpp"
#include "lorentz/keyval.hpp"

namespace lorentz {

/// All scaling knobs of the model. epsilon is the micro/macro ratio, alpha
/// the weak-coupling exponent, delta the diffusive time exponent. The scale
/// function is the power family eta = epsilon^(-eta_exponent), and the early
/// observation time is t_eta = eta^(-t_eta_exponent).
struct ScalingParams {
    double epsilon = 0.1;
    double alpha = 0.25;
    double delta = 1.0;
    int dim = 2;
    double speed = 1.0;
    double eta_exponent = 0.0;     // beta >= 0
    double t_eta_exponent = 2.5;   // omega, must exceed 2*delta

    void validate() const {
        if (!(epsilon > 0.0) || epsilon > 1.0) throw spec_error("epsilon must lie in (0,1]");
        if (!(alpha > 0.0) || !(alpha < 0.5)) throw spec_error("alpha must lie in (0,1/2)");
        if (!(delta > 0.0)) throw spec_error("delta must be positive");
        if (dim != 2 && dim != 3) throw spec_error("dim must be 2 or 3");
        if (!(speed > 0.0)) throw spec_error("speed must be positive");
        if (eta_exponent < 0.0) throw spec_error("eta_exponent must be >= 0");
        if (!(t_eta_exponent > 2.0 * delta))
            throw spec_error("t_eta_exponent must exceed 2*delta");
    }

    double eta() const { return std::pow(epsilon, -eta_exponent); }
    double t_eta() const { return std::pow(eta(), -t_eta_exponent); }
};

/// Quantities derived from ScalingParams: obstacle intensity mu, the scale
/// value eta, the collision-rate factor epsilon^(-2 alpha), and the critical
/// error epsilon^(d-1-8 alpha) * eta^(4 delta).
struct DerivedScales {
    double mu = 0.0;
    double eta = 1.0;
    double collision_rate_scale = 1.0;
    double critical_error = 0.0;
};

inline DerivedScales derive_scales(const ScalingParams& p, bool diffusive) {
    p.validate();
    if (diffusive && !(p.delta > 0.0)) throw spec_error("diffusive scaling requires delta > 0");
    DerivedScales s;
    s.eta = p.eta();
    s.mu = std::pow(p.epsilon, -(p.dim - 1.0) - 2.0 * p.alpha);
    if (diffusive) s.mu *= std::pow(s.eta, p.delta);
    s.collision_rate_scale = std::pow(p.epsilon, -2.0 * p.alpha);
    s.critical_error =
        std::pow(p.epsilon, p.dim - 1.0 - 8.0 * p.alpha) * std::pow(s.eta, 4.0 * p.delta);
    if (!std::isfinite(s.mu) || !std::isfinite(s.critical_error))
        throw numeric_guard_error("derive_scales: non-finite scale");
    return s;
}

/// Admissibility of the diffusive regime: the critical error vanishes as
/// epsilon -> 0 iff d-1-8 alpha-4 delta beta > 0; the weak-coupling window
/// additionally needs alpha < (d-1)/8.
struct RegimeReport {
    double critical_exponent = 0.0;
    bool critical_error_vanishes = false;
    double alpha_threshold = 0.0;
    bool alpha_admissible = false;

    bool pass() const { return critical_error_vanishes && alpha_admissible; }
};

inline RegimeReport check_regime(const ScalingParams& p) {
    p.validate();
    RegimeReport r;
    r.critical_exponent = p.dim - 1.0 - 8.0 * p.alpha - 4.0 * p.delta * p.eta_exponent;
    r.critical_error_vanishes = r.critical_exponent > 0.0;
    r.alpha_threshold = (p.dim - 1.0) / 8.0;
    r.alpha_admissible = p.alpha < r.alpha_threshold;
    return r;
}

/// Surface measure of the sphere of the given radius: 2 pi^{d/2} / Gamma(d/2)
/// * r^{d-1}. Gamma(1) = 1 and Gamma(3/2) = sqrt(pi)/2 are hard-coded.
inline double sphere_surface_measure(int dim, double speed) {
    const double pi = std::numbers::pi;
    if (dim == 2) return 2.0 * pi * speed;
    if (dim == 3) return 4.0 * pi * speed * speed;
    throw spec_error("sphere_surface_measure: dim must be 2 or 3");
}

/// Normalisation K with K * |S^{d-1}_speed| = 1.
inline double sphere_normalization(int dim, double speed) {
    if (!(speed > 0.0)) throw spec_error("sphere_normalization: speed must be positive");
    return 1.0 / sphere_surface_measure(dim, speed);
}

/// Parameters as read from a key=value file; `diffusive` selects the higher
/// obstacle density mu = epsilon^(-d+1-2 alpha) eta^delta.
struct ScalingConfig {
    ScalingParams params;
    bool diffusive = false;
};

inline ScalingConfig scaling_from_keyval(const KeyValueFile& kv) {
    ScalingConfig c;
    c.params.epsilon = kv.get_double("epsilon", c.params.epsilon);
    c.params.alpha = kv.get_double("alpha", c.params.alpha);
    c.params.delta = kv.get_double("delta", c.params.delta);
    c.params.dim = static_cast<int>(kv.get_int("dim", c.params.dim));
    c.params.speed = kv.get_double("speed", c.params.speed);
    c.params.eta_exponent = kv.get_double("eta_exponent", c.params.eta_exponent);
    c.params.t_eta_exponent = kv.get_double("t_eta_exponent", c.params.t_eta_exponent);
    c.diffusive = kv.get_bool("diffusive", c.diffusive);
    c.params.validate();
    return c;
}

inline const std::set<std::string>& scaling_keys() {
    static const std::set<std::string> keys = {"epsilon",      "alpha", "delta",
                                               "dim",          "speed", "eta_exponent",
                                               "t_eta_exponent", "diffusive"};
    return keys;
}

/// Strict loader for a standalone scaling file: unknown keys are an error.
inline ScalingConfig load_scaling_config(const std::string& path) {
    const KeyValueFile kv = KeyValueFile::load(path);
    kv.require_known_keys(scaling_keys());
    return scaling_from_keyval(kv);
}

} // namespace lorentz
