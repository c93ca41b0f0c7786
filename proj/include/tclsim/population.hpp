#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "tclsim/appliance.hpp"
#include "tclsim/controller.hpp"
#include "tclsim/random.hpp"
#include "tclsim/signal.hpp"

namespace tclsim {

/// Recipe for a heterogeneous fleet. Thermal parameters of each appliance
/// are the base model's multiplied by independent uniform factors in
/// [1 - heterogeneity, 1 + heterogeneity]; p_on stays at the base value.
struct FleetSpec {
    std::size_t count = 1000;
    ApplianceModel base_model = domestic_refrigerator();
    double heterogeneity = 0.2;
    double w = 0.9;
    std::uint64_t seed = 1;
};

struct Appliance {
    std::uint64_t index;  // position in the spec, fixes all random streams
    ApplianceModel model;
    SteadyState steady;
    ApplianceState state;
    ControllerMemory memory;
    RandomStream switch_rng;
};

struct Fleet {
    FleetSpec spec;
    std::vector<Appliance> appliances;
    std::size_t resample_count = 0;  // models redrawn for violating the ordering

    double mean_p0() const;
};

/// Builds models and derived steady-state data. Models violating the
/// parameter ordering are redrawn (and counted); a per-appliance budget of
/// 100 attempts guards against pathological heterogeneity.
Fleet generate_fleet(const FleetSpec& spec);

/// Draws each appliance's compressor state with probability equal to its
/// duty cycle, its temperature from the matching conditional steady-state
/// distribution, and resets controller memories to the steady state at t = 0.
void initialize_steady_state(Fleet& fleet, std::uint64_t seed);

/// How invocation times are laid out. Every realized step is positive and
/// the driver additionally splits steps at signal breakpoints.
struct StepPolicy {
    enum class Kind { fixed, jittered, explicit_list };
    Kind kind = Kind::fixed;
    double dt = 10.0;      // s
    double jitter = 0.0;   // s, steps drawn uniformly from [dt - jitter, dt + jitter]
    std::vector<double> times;  // explicit_list: invocation times after 0
};

/// One row per simulated interval, stamped with the interval's start time.
/// Aggregates describe the fleet at that instant, right after the controller
/// invocation that opens the interval.
struct TraceRow {
    double time = 0.0;              // interval start, s
    double pi_requested = 0.0;      // raw signal value for the interval
    double pi_clipped_mean = 0.0;   // mean applied reference across appliances
    double total_power = 0.0;       // W drawn during the interval
    double mean_temperature = 0.0;  // C
    double z_mean = 0.0;            // mean controller displacement
    double z_emp_mean = 0.0;        // displacement recomputed from temperatures
    std::uint64_t forced_switches = 0;
    std::uint64_t stochastic_switches = 0;
    std::uint64_t clamps = 0;            // appliances whose reference was clipped
    std::uint64_t probability_caps = 0;  // combined probabilities capped at 1
    std::uint64_t bound_violations = 0;  // temperatures outside the band by more than one_step_drift
    std::uint64_t drift_violations = 0;  // outside the per-side envelope of two steps' drift
};

struct SimulationTrace {
    std::vector<TraceRow> rows;
    // Opt-in per-appliance series, indexed [row][appliance position].
    std::vector<std::vector<double>> appliance_temperature;
    std::vector<std::vector<std::uint8_t>> appliance_compressor;
};

struct SimulateOptions {
    bool per_appliance_trace = false;
    int threads = 0;  // 0 = all available
};

/// Runs the fleet against the signal from t = 0 to the horizon. Each step:
/// temperatures have been propagated to the step start under the previous
/// compressor states, every controller is invoked with the reference for
/// the upcoming interval, and the new states are propagated across it.
/// Results are bit-identical for identical fleets, signals and policies,
/// regardless of worker count. The fleet is advanced in place.
SimulationTrace simulate(Fleet& fleet, const ReferenceSignal& signal, const StepPolicy& policy,
                         double horizon, const SimulateOptions& options = {});

struct Metrics {
    double rmse_w = 0.0;           // RMS per-appliance tracking error, W
    double max_abs_error_w = 0.0;  // worst per-appliance tracking error, W
    std::uint64_t bound_violations = 0;
    std::uint64_t drift_violations = 0;
    std::uint64_t clamps = 0;
    std::uint64_t forced_switches = 0;
    std::uint64_t stochastic_switches = 0;
    std::uint64_t probability_caps = 0;
};

/// Tracking error per step is total_power / N - pi_clipped_mean * mean(p_0).
Metrics aggregate_metrics(const SimulationTrace& trace, const Fleet& fleet);

/// Per-step CSV with fixed 6-significant-digit formatting; byte-identical
/// across runs with identical configuration.
/// Columns: t_s,pi_requested,pi_clipped_mean,power_w_total,
/// power_w_per_appliance,mean_temp_c,z_mean,forced_switches,
/// stochastic_switches,clamps
void write_trace_csv(const SimulationTrace& trace, std::size_t fleet_size, std::ostream& out);

/// Single-appliance CSV (columns t_s,pi,compressor,temp_c). Requires a trace
/// recorded with per_appliance_trace set.
void write_appliance_csv(const SimulationTrace& trace, std::size_t appliance, std::ostream& out);

}  // namespace tclsim
