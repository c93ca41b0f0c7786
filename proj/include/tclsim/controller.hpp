#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "tclsim/appliance.hpp"
#include "tclsim/errors.hpp"

// Decentralised compressor controller. Each appliance tracks a broadcast
// reference pi (a dimensionless multiple of its steady-state average power)
// by shaping its temperature distribution: a deterministic mean-temperature
// coordinate z is advanced per invocation, the requested reference is
// clipped to what the fleet can sustain, and the compressor is switched
// either deterministically (contracted thermostat bounds) or stochastically
// (continuous-time rates integrated over the elapsed interval plus an
// instantaneous term for reference discontinuities). Invocation intervals
// may have any positive length and need not be known in advance.

namespace tclsim {

// Division guards. Constraint clipping keeps normal operation away from the
// singular configurations; these constants convert numeric blowups on
// pathological inputs into flagged clamps instead of inf/NaN.
inline constexpr double kPivotEpsilon = 1e-9;   // on |z - zeta|, dimensionless
inline constexpr double kDenomEpsilon = 1e-12;  // on C-scale denominators
inline constexpr double kRateCeiling = 1e6;     // substitute rate, 1/s

/// Per-appliance carry-over between controller invocations.
struct ControllerMemory {
    bool compressor;         // state held over the elapsed interval
    double pi_prev;          // applied (post-clip) reference of that interval
    double z_prev;           // mean-temperature displacement at the last invocation
    double t_prev;           // time of the last invocation, s
    double rate_on_off_fwd;  // forward on->off rate stored at the last invocation, 1/s
    double rate_off_on_fwd;  // forward off->on rate, 1/s
    double w;                // operating-range fraction, 0 < w < 1
};

/// Memory for an appliance that has been in the uncontrolled steady state:
/// z = 0, unit reference, no pending switching rates.
inline ControllerMemory steady_state_memory(bool compressor, double t0, double w) {
    return ControllerMemory{compressor, 1.0, 0.0, t0, 0.0, 0.0, w};
}

/// Advances the mean-temperature displacement over one interval:
/// z' = z e^{-alpha dt} + (pi - 1)(1 - e^{-alpha dt}).
/// z = 0 with pi = 1 is a fixed point; constant pi relaxes z toward pi - 1.
inline double update_z(double z_prev, double pi, double alpha_dt) {
    const double decay = std::exp(-alpha_dt);
    return z_prev * decay + (pi - 1.0) * (1.0 - decay);
}

/// Pivot temperature for the upcoming interval: the distribution contracts
/// toward t_max while providing energy (z <= 0) and toward t_min while
/// absorbing it (z > 0).
inline double select_reference(double z, const ApplianceModel& model) {
    return z <= 0.0 ? model.t_max : model.t_min;
}

/// Keeps the reference from driving the mean temperature out of the
/// operating band: once z passes w * zeta(t_max) (or w * zeta(t_min)), the
/// requested value is clamped so the excursion cannot grow.
inline double apply_energy_limits(double pi_next, double z, double w, const SteadyState& steady) {
    if (z <= w * steady.zeta_max) return std::max(pi_next, 1.0 + w * steady.zeta_max);
    if (z >= w * steady.zeta_min) return std::min(pi_next, 1.0 + w * steady.zeta_min);
    return pi_next;
}

/// Instantaneous power limits: the largest reference step the distribution
/// can realise by switching a feasible fraction of devices. The admissible
/// interval depends on the current mode (z <= 0 provision, z > 0 absorption).
inline double apply_power_limits(double pi_next, double z, const ApplianceModel& m,
                                 const SteadyState& ss) {
    const double room = m.t_off - ss.t_bar0;
    const double band = m.t_max - m.t_min;
    double lo, hi;
    if (z <= 0.0) {
        lo = ((ss.t_bar0 - m.t_min) / band) * ((m.t_off - m.t_max) / room);
        hi = (m.t_off - m.t_max) / room +
             (m.t_max - ss.t_bar0) * (m.t_max - m.t_on) / (band * room);
    } else {
        lo = ((m.t_max - ss.t_bar0) / band) * ((m.t_off - m.t_min) / room);
        hi = (m.t_off - m.t_min) / room +
             (ss.t_bar0 - m.t_min) * (m.t_min - m.t_on) / (band * room);
    }
    return std::clamp(pi_next, lo, hi);
}

/// Left (-) and right (+) limits of the mode-dependent quantities at an
/// invocation instant, where both the pivot and the reference may jump.
struct ModeQuantities {
    double r_minus, r_plus;        // pivot temperatures, each t_min or t_max
    double zeta_minus, zeta_plus;  // pivot displacements in z units
    double beta_minus, beta_plus;  // control gains of the heating-rate profile
    double s_minus, s_plus;        // contraction factors about the pivot
};

/// beta = ((pi - 1) - z) / (z - zeta), s = 1 - z / zeta, evaluated on both
/// sides of the invocation. Throws PivotError when z is within kPivotEpsilon
/// of a pivot displacement or beyond the forward one (fully contracted
/// distribution); callers clip the reference first, which keeps normal
/// operation away from that state.
inline ModeQuantities mode_quantities(double z, double pi_prev, double pi_next, double r_prev,
                                      double r_next, const ApplianceModel& model,
                                      const SteadyState& steady) {
    const auto zeta_of = [&](double r) {
        return r == model.t_max ? steady.zeta_max : steady.zeta_min;
    };
    ModeQuantities q;
    q.r_minus = r_prev;
    q.r_plus = r_next;
    q.zeta_minus = zeta_of(r_prev);
    q.zeta_plus = zeta_of(r_next);
    if (std::abs(z - q.zeta_minus) <= kPivotEpsilon || std::abs(z - q.zeta_plus) <= kPivotEpsilon) {
        throw PivotError("mean-temperature displacement reached a pivot value");
    }
    q.beta_minus = ((pi_prev - 1.0) - z) / (z - q.zeta_minus);
    q.beta_plus = ((pi_next - 1.0) - z) / (z - q.zeta_plus);
    q.s_minus = 1.0 - z / q.zeta_minus;
    q.s_plus = 1.0 - z / q.zeta_plus;
    if (q.s_plus <= 0.0) {
        throw PivotError("mean-temperature displacement beyond the pivot value");
    }
    return q;
}

/// Thermostat bounds contracted toward the pivot by the scale factor s:
/// devices outside [t_low, t_high] must switch. s in (0, 1]; the bounds nest
/// inside [t_min, t_max] and the pivot end stays fixed.
inline std::pair<double, double> forced_bounds(double r_plus, double s_plus,
                                               const ApplianceModel& model) {
    assert(s_plus > 0.0 && s_plus <= 1.0 + 1e-12);
    return {r_plus - (r_plus - model.t_min) * s_plus, r_plus - (r_plus - model.t_max) * s_plus};
}

struct SwitchingRates {
    double on_off = 0.0;  // 1/s
    double off_on = 0.0;  // 1/s
    bool clamped = false;  // a division guard engaged
};

/// Continuous-time stochastic switching rates that keep device temperatures
/// aligned with the commanded distribution. At most one of the two rates is
/// nonzero for temperatures strictly inside the contracted band, and both
/// vanish identically in the steady state (beta = 0, s = 1).
inline SwitchingRates switching_rates(double temperature, double beta, double s, double r,
                                      const ApplianceModel& m) {
    // Distances from the scaled support edges of the density (edge_*) and
    // commanded drift offsets relative to each asymptote (drift_*). The
    // rates are ratios built from these four quantities.
    const double edge_off = (temperature - m.t_off) + (m.t_off - r) * (1.0 - s);
    const double edge_on = (temperature - m.t_on) + (m.t_on - r) * (1.0 - s);
    const double drift_off = (temperature - m.t_off) + (temperature - r) * beta;
    const double drift_on = (temperature - m.t_on) + (temperature - r) * beta;

    SwitchingRates out;
    double edges = edge_off * edge_on;
    if (std::abs(edge_off) <= kDenomEpsilon || std::abs(edge_on) <= kDenomEpsilon) {
        out.clamped = true;
        const double magnitude = std::max(std::abs(edges), kDenomEpsilon * kDenomEpsilon);
        edges = (std::signbit(edge_off) != std::signbit(edge_on)) ? -magnitude : magnitude;
    }

    // Probability-flux mismatch that stochastic switching must absorb.
    // Grouped so that the steady state, where drift_off == edge_off and
    // drift_on == edge_on, cancels exactly: the middle factor is then 1.0
    // bit-for-bit and the two terms are identical.
    const double flux = (edge_off + edge_on) * ((drift_off * drift_on) / edges) -
                        (1.0 + beta) * (drift_off + drift_on);
    const double neg_flux = -(m.alpha * m.alpha) * flux;

    const auto rate = [&](double drift) {
        if (std::abs(drift) <= kDenomEpsilon) {
            out.clamped = true;
            if (neg_flux == 0.0) return 0.0;
            const bool positive = (neg_flux > 0.0) != std::signbit(drift);
            return positive ? kRateCeiling : 0.0;
        }
        return std::max(0.0, neg_flux / (m.alpha * drift));
    };
    out.on_off = rate(drift_off);
    out.off_on = rate(drift_on);
    return out;
}

/// Trapezoid integral of the switching rate over the elapsed interval,
/// using the forward rate stored at its start and the backward rate at its
/// end. Capped at 1.
inline double continuous_switch_probability(double dt, double rate_fwd_prev,
                                            double rate_back_now) {
    return std::min(1.0, 0.5 * dt * (rate_fwd_prev + rate_back_now));
}

/// Probability that a device switches at the invocation instant itself,
/// absorbing the discontinuity of the commanded drift profile caused by a
/// reference step or a mode change. Zero when nothing jumps.
inline double instantaneous_switch_probability(double temperature, const ModeQuantities& q,
                                               bool compressor, const ApplianceModel& m,
                                               bool* degenerate = nullptr) {
    const double base = compressor ? temperature - m.t_off : temperature - m.t_on;
    const double num = base + (temperature - q.r_plus) * q.beta_plus;
    const double den = base + (temperature - q.r_minus) * q.beta_minus;
    if (std::abs(den) <= kDenomEpsilon) {
        if (degenerate != nullptr) *degenerate = true;
        return std::signbit(num) != std::signbit(den) ? 1.0 : 0.0;
    }
    return std::clamp(1.0 - num / den, 0.0, 1.0);
}

enum class SwitchCause : std::uint8_t { none, forced, stochastic };

struct UpdateDiagnostics {
    bool compressor;     // state to hold over the upcoming interval
    double pi_applied;   // reference after clipping
    double z;            // displacement at this invocation
    double probability;  // combined stochastic switch probability
    SwitchCause cause = SwitchCause::none;
    bool energy_clamped = false;
    bool power_clamped = false;
    bool probability_capped = false;
    bool rate_clamped = false;
};

/// One controller invocation at time t_now with the reference pi_next for
/// the upcoming interval and the measured temperature. Updates memory in
/// place (clipped reference, z, time, forward rates, compressor) and
/// returns what happened. `draw` supplies one uniform [0,1) variate and is
/// consumed only when a stochastic decision is actually reached; forced
/// switching takes precedence and consumes no randomness.
///
/// Time must not run backwards. dt = 0 is permitted and acts as a pure
/// reference handover (no relaxation, no continuous switching): drivers use
/// it to deliver the first interval's reference at stream start.
template <class UniformFn>
UpdateDiagnostics update_compressor_state(ControllerMemory& memory, double pi_next,
                                          double temperature, double t_now,
                                          const ApplianceModel& model, const SteadyState& steady,
                                          UniformFn&& draw) {
    if (!(t_now >= memory.t_prev)) {
        throw std::invalid_argument("update_compressor_state: time must not decrease");
    }
    if (!(pi_next >= 0.0)) {
        throw std::invalid_argument("update_compressor_state: reference must be >= 0");
    }
    const double dt = t_now - memory.t_prev;
    const double z = update_z(memory.z_prev, memory.pi_prev, model.alpha * dt);

    UpdateDiagnostics diag;
    double pi = apply_energy_limits(pi_next, z, memory.w, steady);
    diag.energy_clamped = pi != pi_next;
    const double pi_after_power = apply_power_limits(pi, z, model, steady);
    diag.power_clamped = pi_after_power != pi;
    pi = pi_after_power;

    const double r_minus = select_reference(memory.z_prev, model);
    const double r_plus = select_reference(z, model);
    const ModeQuantities q = mode_quantities(z, memory.pi_prev, pi, r_minus, r_plus, model, steady);

    const SwitchingRates back = switching_rates(temperature, q.beta_minus, q.s_minus, q.r_minus, model);
    const SwitchingRates fwd = switching_rates(temperature, q.beta_plus, q.s_plus, q.r_plus, model);
    diag.rate_clamped = back.clamped || fwd.clamped;

    const bool on = memory.compressor;
    const double p_cont = continuous_switch_probability(
        dt, on ? memory.rate_on_off_fwd : memory.rate_off_on_fwd, on ? back.on_off : back.off_on);
    bool degenerate = false;
    const double p_inst = instantaneous_switch_probability(temperature, q, on, model, &degenerate);
    diag.rate_clamped = diag.rate_clamped || degenerate;

    double probability = p_cont + p_inst;
    if (probability > 1.0) {
        probability = 1.0;
        diag.probability_capped = true;
    }
    diag.probability = probability;

    const auto [t_low, t_high] = forced_bounds(q.r_plus, q.s_plus, model);
    bool next = on;
    if (on) {
        if (temperature <= t_low) {
            next = false;
            diag.cause = SwitchCause::forced;
        } else if (probability > 0.0 && draw() < probability) {
            next = false;
            diag.cause = SwitchCause::stochastic;
        }
    } else {
        if (temperature >= t_high) {
            next = true;
            diag.cause = SwitchCause::forced;
        } else if (probability > 0.0 && draw() < probability) {
            next = true;
            diag.cause = SwitchCause::stochastic;
        }
    }

    memory.compressor = next;
    memory.pi_prev = pi;
    memory.z_prev = z;
    memory.t_prev = t_now;
    memory.rate_on_off_fwd = fwd.on_off;
    memory.rate_off_on_fwd = fwd.off_on;

    diag.compressor = next;
    diag.pi_applied = pi;
    diag.z = z;
    return diag;
}

}  // namespace tclsim
