// Command-line driver: fleet simulations, single-appliance traces and
// throughput benchmarks, emitting CSV for external plotting.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tclsim/errors.hpp"
#include "tclsim/population.hpp"
#include "tclsim/signal.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

constexpr int kExitInvalidConfig = 2;
constexpr int kExitSignalError = 3;

struct RunConfig {
    std::size_t fleet_size = 1000;
    std::uint64_t seed = 1;
    std::string signal = "demo";
    double dt = 10.0;
    double jitter = 0.0;
    double heterogeneity = 0.2;
    double w = 0.9;
    double horizon = 18000.0;
    std::string output;
    bool per_appliance = false;
    int threads = 0;
};

void add_common_options(CLI::App& cmd, RunConfig& config) {
    cmd.add_option("-n,--fleet-size", config.fleet_size, "Number of appliances");
    cmd.add_option("--seed", config.seed, "Seed for fleet generation, initialization and switching");
    cmd.add_option("--signal", config.signal, "Reference signal: 'demo' or a CSV path (header t_s,pi)");
    cmd.add_option("--dt", config.dt, "Nominal step length in seconds");
    cmd.add_option("--jitter", config.jitter, "Half-width of uniform step jitter in seconds");
    cmd.add_option("--heterogeneity", config.heterogeneity,
                   "Half-width of the uniform parameter scatter (0.2 = +/-20%)");
    cmd.add_option("--w", config.w, "Operating-range fraction of the temperature band");
    cmd.add_option("--horizon", config.horizon, "Simulated time in seconds");
    cmd.add_option("-o,--output", config.output, "Write the CSV here instead of stdout");
    cmd.add_option("--threads", config.threads, "Worker threads (0 = all available)");
}

tclsim::ReferenceSignal load_signal(const RunConfig& config) {
    if (config.signal == "demo") return tclsim::demo_signal();
    return tclsim::load_signal_file(config.signal);
}

tclsim::Fleet make_fleet(const RunConfig& config) {
    tclsim::FleetSpec spec;
    spec.count = config.fleet_size;
    spec.heterogeneity = config.heterogeneity;
    spec.w = config.w;
    spec.seed = config.seed;
    tclsim::Fleet fleet = tclsim::generate_fleet(spec);
    tclsim::initialize_steady_state(fleet, config.seed);
    return fleet;
}

tclsim::StepPolicy make_policy(const RunConfig& config) {
    tclsim::StepPolicy policy;
    policy.kind = config.jitter > 0.0 ? tclsim::StepPolicy::Kind::jittered
                                      : tclsim::StepPolicy::Kind::fixed;
    policy.dt = config.dt;
    policy.jitter = config.jitter;
    return policy;
}

void write_output(const RunConfig& config, const std::string& text) {
    if (config.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(config.output, std::ios::binary);
    if (!out) throw tclsim::ConfigError("cannot open output file '" + config.output + "'");
    out << text;
}

int run_simulate(const RunConfig& config) {
    const tclsim::ReferenceSignal signal = load_signal(config);
    tclsim::Fleet fleet = make_fleet(config);
    tclsim::SimulateOptions options;
    options.per_appliance_trace = config.per_appliance;
    options.threads = config.threads;
    const tclsim::SimulationTrace trace =
        tclsim::simulate(fleet, signal, make_policy(config), config.horizon, options);
    const tclsim::Metrics metrics = tclsim::aggregate_metrics(trace, fleet);

    std::ostringstream csv;
    tclsim::write_trace_csv(trace, fleet.appliances.size(), csv);
    write_output(config, csv.str());

    std::printf("# rmse_w=%.6g max_abs_error_w=%.6g bound_violations=%llu forced=%llu "
                "stochastic=%llu clamps=%llu\n",
                metrics.rmse_w, metrics.max_abs_error_w,
                static_cast<unsigned long long>(metrics.bound_violations),
                static_cast<unsigned long long>(metrics.forced_switches),
                static_cast<unsigned long long>(metrics.stochastic_switches),
                static_cast<unsigned long long>(metrics.clamps));
    return 0;
}

int run_trace(const RunConfig& config) {
    const tclsim::ReferenceSignal signal = load_signal(config);
    tclsim::Fleet fleet = make_fleet(config);
    tclsim::SimulateOptions options;
    options.per_appliance_trace = true;
    options.threads = config.threads;
    const tclsim::SimulationTrace trace =
        tclsim::simulate(fleet, signal, make_policy(config), config.horizon, options);

    std::ostringstream csv;
    tclsim::write_appliance_csv(trace, 0, csv);
    write_output(config, csv.str());
    return 0;
}

int run_bench(const RunConfig& config) {
    const tclsim::ReferenceSignal signal = load_signal(config);
    tclsim::Fleet fleet = make_fleet(config);
    tclsim::SimulateOptions options;
    options.threads = config.threads;

    const auto start = std::chrono::steady_clock::now();
    const tclsim::SimulationTrace trace =
        tclsim::simulate(fleet, signal, make_policy(config), config.horizon, options);
    const auto stop = std::chrono::steady_clock::now();

    const double wall = std::chrono::duration<double>(stop - start).count();
    const auto appliance_steps =
        static_cast<unsigned long long>(trace.rows.size()) * fleet.appliances.size();
    int workers = 1;
#ifdef _OPENMP
    workers = config.threads > 0 ? config.threads : omp_get_max_threads();
#endif
    std::printf("wall_s=%.3f appliance_steps=%llu appliance_steps_per_s=%.4g workers=%d\n", wall,
                appliance_steps, static_cast<double>(appliance_steps) / wall, workers);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decentralised demand-response simulator for refrigerator fleets"};
    app.require_subcommand(1);

    RunConfig sim_config;
    CLI::App* sim = app.add_subcommand("simulate", "Run a fleet and write the per-step trace CSV");
    add_common_options(*sim, sim_config);
    sim->add_flag("--per-appliance-trace", sim_config.per_appliance,
                  "Also retain per-appliance series in memory (costly for large fleets)");

    RunConfig trace_config;
    trace_config.fleet_size = 1;
    CLI::App* trace = app.add_subcommand("trace", "Write one appliance's t/pi/compressor/temp CSV");
    add_common_options(*trace, trace_config);

    RunConfig bench_config;
    bench_config.fleet_size = 100000;
    CLI::App* bench = app.add_subcommand("bench", "Time a run without retaining any trace");
    add_common_options(*bench, bench_config);

    try {
        app.parse(argc, argv);
        if (sim->parsed()) return run_simulate(sim_config);
        if (trace->parsed()) return run_trace(trace_config);
        if (bench->parsed()) return run_bench(bench_config);
        return kExitInvalidConfig;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalidConfig;
    } catch (const tclsim::ParseError& e) {
        std::fprintf(stderr, "signal error: %s\n", e.what());
        return kExitSignalError;
    } catch (const tclsim::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitInvalidConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvalidConfig;
    }
}
