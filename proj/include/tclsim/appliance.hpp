#pragma once

namespace tclsim {

/// First-order thermal model of one compressor appliance.
/// Temperatures in degrees Celsius, alpha in 1/s, p_on in watts.
///
/// The compartment temperature relaxes exponentially toward t_on while the
/// compressor runs and toward t_off while it does not:
///     dT/dt = -alpha * (T - t_on)   (compressor on)
///     dT/dt = -alpha * (T - t_off)  (compressor off)
/// The thermostat band is [t_min, t_max].
struct ApplianceModel {
    double alpha;  // thermal rate constant, 1/s
    double t_off;  // asymptotic temperature with the compressor off
    double t_on;   // asymptotic temperature with the compressor on
    double t_min;  // lower thermostat bound
    double t_max;  // upper thermostat bound
    double p_on;   // compressor power draw, W

    /// t_on < t_min < t_max < t_off, alpha > 0, p_on > 0, all finite.
    bool well_formed() const noexcept;
    /// Throws ConfigError unless well_formed().
    void validate() const;
};

/// Domestic refrigerator parameters used as simulation defaults
/// (alpha = 1/7200 1/s, band 2..7 C, asymptotes -44 C / 20 C, 70 W).
ApplianceModel domestic_refrigerator();

struct ApplianceState {
    double temperature;
    bool compressor;
};

/// Quantities derived from the uncontrolled hysteresis cycle, cached per model.
struct SteadyState {
    double k;         // normalisation constant of the steady-state density, C
    double t_bar0;    // mean temperature of the steady-state distribution, C
    double duty;      // fraction of the cycle spent with the compressor on
    double p_0;       // average power, duty * p_on, W
    double zeta_min;  // displacement of t_min from t_bar0 in z units (> 0)
    double zeta_max;  // displacement of t_max from t_bar0 in z units (< 0)
};

SteadyState steady_state(const ApplianceModel& model);

/// Exact solution of the thermal model over dt seconds (dt >= 0) under a
/// fixed compressor state. No ODE stepping; results are independent of how
/// an interval is subdivided.
double propagate_temperature(const ApplianceModel& model, double temperature, bool compressor,
                             double dt);

/// Inverse-CDF draw from the steady-state temperature distribution
/// conditioned on the compressor state. u in [0, 1]; the result lands in
/// [t_min, t_max] with t_min at u = 0 and t_max at u = 1.
double sample_steady_state_temperature(const ApplianceModel& model, bool compressor, double u);

/// (t_off - t_min) * (1 - e^{-alpha dt}): bounds the one-step temperature
/// rise of any device in the thermostat band.
double one_step_drift(const ApplianceModel& model, double dt);

/// How far below t_min a device can land after running the compressor for
/// dt seconds from inside the band: (t_min - t_on) * (1 - e^{-alpha dt}).
double max_undershoot(const ApplianceModel& model, double dt);

/// How far above t_max a device can land after idling for dt seconds from
/// inside the band: (t_off - t_max) * (1 - e^{-alpha dt}).
double max_overshoot(const ApplianceModel& model, double dt);

}  // namespace tclsim
