#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CommandResult {
    int exit_code;
    std::string output;  // stdout and stderr combined
};

CommandResult run_cli(const std::string& args) {
    const std::string command = std::string(TCLSIM_CLI_PATH) + " " + args + " 2>&1";
    std::array<char, 4096> buffer{};
    std::string output;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (std::fgets(buffer.data(), buffer.size(), pipe) != nullptr) output += buffer.data();
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

std::string temp_path(const std::string& name) {
    return std::string("cli_test_") + name;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream contents;
    contents << in.rdbuf();
    return contents.str();
}

std::size_t count_lines(const std::string& text) {
    std::size_t lines = 0;
    for (char c : text) lines += c == '\n';
    return lines;
}

}  // namespace

TEST_CASE("simulate: demo run emits the 1800-row trace and a summary") {
    const std::string out = temp_path("sim.csv");
    const CommandResult r =
        run_cli("simulate --fleet-size 1000 --signal demo --seed 1 -o " + out);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("# rmse_w=") != std::string::npos);
    const std::string csv = read_file(out);
    CHECK(count_lines(csv) == 1801);  // header + 5 h / 10 s rows
    CHECK(csv.rfind("t_s,pi_requested,pi_clipped_mean,power_w_total,power_w_per_appliance,"
                    "mean_temp_c,z_mean,forced_switches,stochastic_switches,clamps\n",
                    0) == 0);
    std::remove(out.c_str());
}

TEST_CASE("simulate: invalid configuration exits 2") {
    CHECK(run_cli("simulate --fleet-size 0").exit_code == 2);
    CHECK(run_cli("simulate --heterogeneity 1.5").exit_code == 2);
    CHECK(run_cli("simulate --bogus-flag 1").exit_code == 2);
    CHECK(run_cli("").exit_code == 2);  // missing subcommand
}

TEST_CASE("simulate: signal problems exit 3") {
    CHECK(run_cli("simulate --signal /nonexistent/signal.csv").exit_code == 3);

    const std::string bad = temp_path("bad_signal.csv");
    {
        std::ofstream out(bad);
        out << "t_s,pi\n100,1.0\n";  // missing t = 0 row
    }
    const CommandResult r = run_cli("simulate --signal " + bad);
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("line") != std::string::npos);
    std::remove(bad.c_str());
}

TEST_CASE("simulate: custom signal file drives the reference column") {
    const std::string signal = temp_path("signal.csv");
    {
        std::ofstream out(signal);
        out << "t_s,pi\n0,1.0\n60,0.75\n";
    }
    const std::string out = temp_path("sim_custom.csv");
    const CommandResult r = run_cli("simulate -n 50 --signal " + signal +
                                    " --horizon 120 -o " + out);
    CHECK(r.exit_code == 0);
    const std::string csv = read_file(out);
    CHECK(csv.find("\n50,1,") != std::string::npos);    // last interval before the step
    CHECK(csv.find("\n60,0.75,") != std::string::npos); // first interval after it
    std::remove(signal.c_str());
    std::remove(out.c_str());
}

TEST_CASE("trace: single-appliance output is deterministic and well-formed") {
    const std::string out1 = temp_path("trace1.csv");
    const std::string out2 = temp_path("trace2.csv");
    CHECK(run_cli("trace --seed 42 -o " + out1).exit_code == 0);
    CHECK(run_cli("trace --seed 42 -o " + out2).exit_code == 0);
    const std::string a = read_file(out1);
    CHECK(a == read_file(out2));
    CHECK(a.rfind("t_s,pi,compressor,temp_c\n", 0) == 0);
    CHECK(count_lines(a) == 1801);
    std::remove(out1.c_str());
    std::remove(out2.c_str());
}

TEST_CASE("simulate: identical seeds and different thread counts give identical files") {
    const std::string out1 = temp_path("det1.csv");
    const std::string out2 = temp_path("det2.csv");
    CHECK(run_cli("simulate -n 300 --seed 9 --horizon 3600 --threads 1 -o " + out1).exit_code == 0);
    CHECK(run_cli("simulate -n 300 --seed 9 --horizon 3600 --threads 2 -o " + out2).exit_code == 0);
    CHECK(read_file(out1) == read_file(out2));
    std::remove(out1.c_str());
    std::remove(out2.c_str());
}

TEST_CASE("bench: reports timing fields") {
    const CommandResult r = run_cli("bench -n 2000 --horizon 600");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("wall_s=") != std::string::npos);
    CHECK(r.output.find("appliance_steps=120000") != std::string::npos);  // 2000 x 60
    CHECK(r.output.find("appliance_steps_per_s=") != std::string::npos);
    CHECK(r.output.find("workers=") != std::string::npos);
}
