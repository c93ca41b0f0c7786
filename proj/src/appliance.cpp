#include "tclsim/appliance.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "tclsim/errors.hpp"

namespace tclsim {

bool ApplianceModel::well_formed() const noexcept {
    return std::isfinite(alpha) && std::isfinite(t_off) && std::isfinite(t_on) &&
           std::isfinite(t_min) && std::isfinite(t_max) && std::isfinite(p_on) && alpha > 0.0 &&
           p_on > 0.0 && t_on < t_min && t_min < t_max && t_max < t_off;
}

void ApplianceModel::validate() const {
    if (!well_formed()) {
        throw ConfigError("appliance model requires t_on < t_min < t_max < t_off, alpha > 0 and p_on > 0");
    }
}

ApplianceModel domestic_refrigerator() {
    return ApplianceModel{
        .alpha = 1.0 / 7200.0,
        .t_off = 20.0,
        .t_on = -44.0,
        .t_min = 2.0,
        .t_max = 7.0,
        .p_on = 70.0,
    };
}

SteadyState steady_state(const ApplianceModel& model) {
    model.validate();
    // Log run lengths of the two hysteresis branches: the on-branch takes
    // log_on / alpha seconds from t_max down to t_min, the off-branch
    // log_off / alpha seconds back up.
    const double log_on = std::log((model.t_max - model.t_on) / (model.t_min - model.t_on));
    const double log_off = std::log((model.t_off - model.t_min) / (model.t_off - model.t_max));
    SteadyState ss;
    ss.k = (model.t_off - model.t_on) / (log_on + log_off);
    ss.t_bar0 = model.t_off - ss.k * log_on;
    ss.duty = log_on / (log_on + log_off);
    ss.p_0 = ss.duty * model.p_on;
    const double room = model.t_off - ss.t_bar0;
    ss.zeta_min = (ss.t_bar0 - model.t_min) / room;
    ss.zeta_max = (ss.t_bar0 - model.t_max) / room;
    return ss;
}

double propagate_temperature(const ApplianceModel& model, double temperature, bool compressor,
                             double dt) {
    assert(dt >= 0.0);
    // Written as T + (asym - T)(1 - e^{-a dt}) so dt = 0 returns T exactly
    // and the asymptote is an exact fixed point.
    const double asymptote = compressor ? model.t_on : model.t_off;
    return temperature + (asymptote - temperature) * -std::expm1(-model.alpha * dt);
}

double sample_steady_state_temperature(const ApplianceModel& model, bool compressor, double u) {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw std::invalid_argument("sample_steady_state_temperature: u must be in [0, 1]");
    }
    if (compressor) {
        // density proportional to 1/(T - t_on) on [t_min, t_max]
        const double lo = model.t_min - model.t_on;
        const double hi = model.t_max - model.t_on;
        return model.t_on + lo * std::pow(hi / lo, u);
    }
    // density proportional to 1/(t_off - T) on [t_min, t_max]
    const double lo = model.t_off - model.t_min;
    const double hi = model.t_off - model.t_max;
    return model.t_off - lo * std::pow(hi / lo, u);
}

double one_step_drift(const ApplianceModel& model, double dt) {
    return (model.t_off - model.t_min) * -std::expm1(-model.alpha * dt);
}

double max_undershoot(const ApplianceModel& model, double dt) {
    return (model.t_min - model.t_on) * -std::expm1(-model.alpha * dt);
}

double max_overshoot(const ApplianceModel& model, double dt) {
    return (model.t_off - model.t_max) * -std::expm1(-model.alpha * dt);
}

}  // namespace tclsim
