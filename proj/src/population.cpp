#include "tclsim/population.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "tclsim/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tclsim {

namespace {

int effective_threads(int requested) {
#ifdef _OPENMP
    return requested > 0 ? requested : omp_get_max_threads();
#else
    (void)requested;
    return 1;
#endif
}

void validate_spec(const FleetSpec& spec) {
    if (spec.count < 1) throw ConfigError("fleet size must be >= 1");
    if (!(spec.heterogeneity >= 0.0 && spec.heterogeneity < 1.0)) {
        throw ConfigError("heterogeneity must be in [0, 1)");
    }
    if (!(spec.w > 0.0 && spec.w < 1.0)) throw ConfigError("w must be in (0, 1)");
    spec.base_model.validate();
}

}  // namespace

double Fleet::mean_p0() const {
    double sum = 0.0;
    for (const Appliance& a : appliances) sum += a.steady.p_0;
    return sum / static_cast<double>(appliances.size());
}

Fleet generate_fleet(const FleetSpec& spec) {
    validate_spec(spec);
    Fleet fleet;
    fleet.spec = spec;
    fleet.appliances.reserve(spec.count);
    const double h = spec.heterogeneity;
    for (std::size_t i = 0; i < spec.count; ++i) {
        RandomStream rng = make_stream(spec.seed, i, StreamPurpose::fleet_generation);
        ApplianceModel model{};
        int attempts = 0;
        for (;;) {
            const auto factor = [&] { return 1.0 - h + 2.0 * h * rng.uniform(); };
            model = spec.base_model;
            model.alpha *= factor();
            model.t_max *= factor();
            model.t_min *= factor();
            model.t_on *= factor();
            model.t_off *= factor();
            if (model.well_formed()) break;
            ++fleet.resample_count;
            if (++attempts >= 100) {
                throw ConfigError("fleet generation exceeded the resample budget; "
                                  "heterogeneity is incompatible with the base model");
            }
        }
        Appliance a;
        a.index = i;
        a.model = model;
        a.steady = steady_state(model);
        a.state = ApplianceState{a.steady.t_bar0, false};
        a.memory = steady_state_memory(false, 0.0, spec.w);
        fleet.appliances.push_back(a);
    }
    return fleet;
}

void initialize_steady_state(Fleet& fleet, std::uint64_t seed) {
    for (Appliance& a : fleet.appliances) {
        RandomStream rng = make_stream(seed, a.index, StreamPurpose::initialization);
        const bool on = rng.uniform() < a.steady.duty;
        const double temperature = sample_steady_state_temperature(a.model, on, rng.uniform());
        a.state = ApplianceState{temperature, on};
        a.memory = steady_state_memory(on, 0.0, fleet.spec.w);
        a.switch_rng = make_stream(seed, a.index, StreamPurpose::switching);
    }
}

namespace {

// Invocation grid: policy steps split at signal breakpoints so every
// interval carries a single reference value.
std::vector<double> build_time_grid(const StepPolicy& policy, const ReferenceSignal& signal,
                                    double horizon, std::uint64_t seed) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw ConfigError("horizon must be positive");
    }
    RandomStream jitter_rng = make_stream(seed, 0, StreamPurpose::step_jitter);
    std::size_t explicit_pos = 0;
    const auto next_step = [&](double t) {
        switch (policy.kind) {
            case StepPolicy::Kind::fixed:
                if (!(policy.dt > 0.0)) throw ConfigError("step size must be positive");
                return policy.dt;
            case StepPolicy::Kind::jittered: {
                if (!(policy.dt > 0.0)) throw ConfigError("step size must be positive");
                if (!(policy.jitter >= 0.0 && policy.jitter < policy.dt)) {
                    throw ConfigError("jitter must be in [0, dt)");
                }
                return policy.dt - policy.jitter + 2.0 * policy.jitter * jitter_rng.uniform();
            }
            case StepPolicy::Kind::explicit_list: {
                while (explicit_pos < policy.times.size() && policy.times[explicit_pos] <= t) {
                    ++explicit_pos;
                }
                if (explicit_pos == policy.times.size()) {
                    throw ConfigError("explicit step list ends before the horizon");
                }
                return policy.times[explicit_pos] - t;
            }
        }
        throw ConfigError("unknown step policy");
    };

    std::vector<double> times{0.0};
    double t = 0.0;
    while (t < horizon) {
        double t_next = std::min(t + next_step(t), horizon);
        if (const auto bp = signal.next_breakpoint_after(t); bp && *bp < t_next) {
            t_next = *bp;
        }
        if (!(t_next > t)) throw ConfigError("realized step is not positive");
        times.push_back(t_next);
        t = t_next;
    }
    return times;
}

struct ChunkAccum {
    double power = 0.0;
    double temperature = 0.0;
    double z = 0.0;
    double z_emp = 0.0;
    double pi_applied = 0.0;
    std::uint64_t forced = 0;
    std::uint64_t stochastic = 0;
    std::uint64_t clamps = 0;
    std::uint64_t caps = 0;
    std::uint64_t viol_band = 0;
    std::uint64_t viol_drift = 0;
};

constexpr std::size_t kChunk = 4096;  // fixed, so reductions do not depend on worker count

}  // namespace

SimulationTrace simulate(Fleet& fleet, const ReferenceSignal& signal, const StepPolicy& policy,
                         double horizon, const SimulateOptions& options) {
    if (fleet.appliances.empty()) throw ConfigError("fleet is empty");
    const std::vector<double> times = build_time_grid(policy, signal, horizon, fleet.spec.seed);
    const std::size_t n = fleet.appliances.size();
    const std::size_t steps = times.size() - 1;
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    const int threads = effective_threads(options.threads);

    SimulationTrace trace;
    trace.rows.reserve(steps);
    if (options.per_appliance_trace) {
        trace.appliance_temperature.assign(steps, std::vector<double>(n));
        trace.appliance_compressor.assign(steps, std::vector<std::uint8_t>(n));
    }
    std::vector<ChunkAccum> partials(chunks);

    for (std::size_t i = 0; i < steps; ++i) {
        const double t = times[i];
        const double t_next = times[i + 1];
        const double dt_prev = i == 0 ? 0.0 : times[i] - times[i - 1];
        // Drift window of the two preceding intervals: a device that leaves
        // the band can pick up one further same-direction step when a
        // discontinuity switches it while already outside; the forced rule
        // then terminates the excursion.
        const double dt_drift = i < 2 ? dt_prev : times[i] - times[i - 2];
        const double dt_next = t_next - t;
        const double pi_raw = signal.value_for_interval(t, t_next);

#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
        for (std::size_t c = 0; c < chunks; ++c) {
            ChunkAccum acc;
            const std::size_t begin = c * kChunk;
            const std::size_t end = std::min(begin + kChunk, n);
            for (std::size_t j = begin; j < end; ++j) {
                Appliance& a = fleet.appliances[j];
                const double temperature = a.state.temperature;

                if (temperature < a.model.t_min || temperature > a.model.t_max) {
                    if (temperature < a.model.t_min - one_step_drift(a.model, dt_prev) ||
                        temperature > a.model.t_max + one_step_drift(a.model, dt_prev)) {
                        ++acc.viol_band;
                    }
                    if (temperature < a.model.t_min - max_undershoot(a.model, dt_drift) ||
                        temperature > a.model.t_max + max_overshoot(a.model, dt_drift)) {
                        ++acc.viol_drift;
                    }
                }

                const UpdateDiagnostics diag =
                    update_compressor_state(a.memory, pi_raw, temperature, t, a.model, a.steady,
                                            [&a] { return a.switch_rng.uniform(); });
                a.state.compressor = diag.compressor;

                acc.power += diag.compressor ? a.model.p_on : 0.0;
                acc.temperature += temperature;
                acc.z += diag.z;
                acc.z_emp += (a.steady.t_bar0 - temperature) / (a.model.t_off - a.steady.t_bar0);
                acc.pi_applied += diag.pi_applied;
                acc.forced += diag.cause == SwitchCause::forced;
                acc.stochastic += diag.cause == SwitchCause::stochastic;
                acc.clamps += diag.energy_clamped || diag.power_clamped;
                acc.caps += diag.probability_capped;

                a.state.temperature =
                    propagate_temperature(a.model, temperature, diag.compressor, dt_next);

                if (options.per_appliance_trace) {
                    trace.appliance_temperature[i][j] = temperature;
                    trace.appliance_compressor[i][j] = diag.compressor ? 1 : 0;
                }
            }
            partials[c] = acc;
        }

        // Fold partials in chunk order: sums are independent of worker count.
        ChunkAccum total;
        for (const ChunkAccum& acc : partials) {
            total.power += acc.power;
            total.temperature += acc.temperature;
            total.z += acc.z;
            total.z_emp += acc.z_emp;
            total.pi_applied += acc.pi_applied;
            total.forced += acc.forced;
            total.stochastic += acc.stochastic;
            total.clamps += acc.clamps;
            total.caps += acc.caps;
            total.viol_band += acc.viol_band;
            total.viol_drift += acc.viol_drift;
        }

        TraceRow row;
        row.time = t;
        row.pi_requested = pi_raw;
        row.pi_clipped_mean = total.pi_applied / static_cast<double>(n);
        row.total_power = total.power;
        row.mean_temperature = total.temperature / static_cast<double>(n);
        row.z_mean = total.z / static_cast<double>(n);
        row.z_emp_mean = total.z_emp / static_cast<double>(n);
        row.forced_switches = total.forced;
        row.stochastic_switches = total.stochastic;
        row.clamps = total.clamps;
        row.probability_caps = total.caps;
        row.bound_violations = total.viol_band;
        row.drift_violations = total.viol_drift;
        trace.rows.push_back(row);
    }
    return trace;
}

Metrics aggregate_metrics(const SimulationTrace& trace, const Fleet& fleet) {
    Metrics m;
    if (trace.rows.empty()) return m;
    const double n = static_cast<double>(fleet.appliances.size());
    const double mean_p0 = fleet.mean_p0();
    double sum_sq = 0.0;
    for (const TraceRow& row : trace.rows) {
        const double error = row.total_power / n - row.pi_clipped_mean * mean_p0;
        sum_sq += error * error;
        m.max_abs_error_w = std::max(m.max_abs_error_w, std::abs(error));
        m.bound_violations += row.bound_violations;
        m.drift_violations += row.drift_violations;
        m.clamps += row.clamps;
        m.forced_switches += row.forced_switches;
        m.stochastic_switches += row.stochastic_switches;
        m.probability_caps += row.probability_caps;
    }
    m.rmse_w = std::sqrt(sum_sq / static_cast<double>(trace.rows.size()));
    return m;
}

namespace {

// Fixed 6 significant digits: deterministic output across platforms.
void append_number(std::string& out, double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.6g", value);
    out += buffer;
}

}  // namespace

void write_trace_csv(const SimulationTrace& trace, std::size_t fleet_size, std::ostream& out) {
    std::string buffer;
    buffer.reserve(trace.rows.size() * 96 + 128);
    buffer += "t_s,pi_requested,pi_clipped_mean,power_w_total,power_w_per_appliance,"
              "mean_temp_c,z_mean,forced_switches,stochastic_switches,clamps\n";
    for (const TraceRow& row : trace.rows) {
        append_number(buffer, row.time);
        buffer += ',';
        append_number(buffer, row.pi_requested);
        buffer += ',';
        append_number(buffer, row.pi_clipped_mean);
        buffer += ',';
        append_number(buffer, row.total_power);
        buffer += ',';
        append_number(buffer, row.total_power / static_cast<double>(fleet_size));
        buffer += ',';
        append_number(buffer, row.mean_temperature);
        buffer += ',';
        append_number(buffer, row.z_mean);
        buffer += ',';
        buffer += std::to_string(row.forced_switches);
        buffer += ',';
        buffer += std::to_string(row.stochastic_switches);
        buffer += ',';
        buffer += std::to_string(row.clamps);
        buffer += '\n';
    }
    out << buffer;
}

void write_appliance_csv(const SimulationTrace& trace, std::size_t appliance, std::ostream& out) {
    if (trace.appliance_temperature.size() != trace.rows.size()) {
        throw ConfigError("trace was recorded without per-appliance series");
    }
    std::string buffer;
    buffer.reserve(trace.rows.size() * 32 + 32);
    buffer += "t_s,pi,compressor,temp_c\n";
    for (std::size_t i = 0; i < trace.rows.size(); ++i) {
        append_number(buffer, trace.rows[i].time);
        buffer += ',';
        append_number(buffer, trace.rows[i].pi_requested);
        buffer += ',';
        buffer += trace.appliance_compressor[i][appliance] ? '1' : '0';
        buffer += ',';
        append_number(buffer, trace.appliance_temperature[i][appliance]);
        buffer += '\n';
    }
    out << buffer;
}

}  // namespace tclsim
