#include "tclsim/signal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tclsim/errors.hpp"

namespace tclsim {

ReferenceSignal::ReferenceSignal(std::vector<Breakpoint> breakpoints)
    : breakpoints_(std::move(breakpoints)) {
    if (breakpoints_.empty()) {
        throw ConfigError("reference signal needs at least one breakpoint");
    }
    if (breakpoints_.front().t_start != 0.0) {
        throw ConfigError("reference signal must start at t = 0");
    }
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        const Breakpoint& bp = breakpoints_[i];
        if (!std::isfinite(bp.t_start) || !std::isfinite(bp.value) || bp.value < 0.0) {
            throw ConfigError("reference signal values must be finite and >= 0");
        }
        if (i > 0 && !(bp.t_start > breakpoints_[i - 1].t_start)) {
            throw ConfigError("reference signal times must be strictly increasing");
        }
    }
}

double ReferenceSignal::value_for_interval(double t_from, double t_to) const {
    if (!(t_from < t_to)) {
        throw std::invalid_argument("value_for_interval: empty interval");
    }
    if (t_from < 0.0) {
        throw std::invalid_argument("value_for_interval: interval starts before the signal");
    }
    // Last breakpoint with t_start <= t_from governs (t_from, ...].
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t_from,
                               [](double t, const Breakpoint& bp) { return t < bp.t_start; });
    const Breakpoint& governing = *(it - 1);
    if (it != breakpoints_.end() && it->t_start < t_to) {
        throw std::invalid_argument("value_for_interval: interval straddles a breakpoint");
    }
    return governing.value;
}

std::optional<double> ReferenceSignal::next_breakpoint_after(double t) const {
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t,
                               [](double value, const Breakpoint& bp) { return value < bp.t_start; });
    if (it == breakpoints_.end()) return std::nullopt;
    return it->t_start;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    return s;
}

double parse_number(std::string_view field, std::size_t line) {
    field = trim(field);
    double value = 0.0;
    const auto* begin = field.data();
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || field.empty()) {
        throw ParseError("malformed number '" + std::string(field) + "'", line);
    }
    return value;
}

}  // namespace

ReferenceSignal parse_signal(std::string_view text) {
    std::vector<Breakpoint> breakpoints;
    std::size_t line_number = 0;
    bool header_seen = false;
    while (!text.empty()) {
        const auto newline = text.find('\n');
        std::string_view line = text.substr(0, newline);
        text.remove_prefix(newline == std::string_view::npos ? text.size() : newline + 1);
        ++line_number;

        line = trim(line);
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != "t_s,pi") {
                throw ParseError("expected header 't_s,pi'", line_number);
            }
            header_seen = true;
            continue;
        }

        const auto comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
            throw ParseError("expected two comma-separated columns", line_number);
        }
        const double t = parse_number(line.substr(0, comma), line_number);
        const double value = parse_number(line.substr(comma + 1), line_number);
        if (!std::isfinite(t) || !std::isfinite(value)) {
            throw ParseError("non-finite value", line_number);
        }
        if (value < 0.0) {
            throw ParseError("reference values must be >= 0", line_number);
        }
        if (breakpoints.empty()) {
            if (t != 0.0) {
                throw ParseError("first row must be at t = 0", line_number);
            }
        } else if (!(t > breakpoints.back().t_start)) {
            throw ParseError("times must be strictly increasing", line_number);
        }
        breakpoints.push_back({t, value});
    }
    if (!header_seen) {
        throw ParseError("empty signal", 0);
    }
    if (breakpoints.empty()) {
        throw ParseError("signal has no rows", line_number);
    }
    return ReferenceSignal(std::move(breakpoints));
}

std::string serialize_signal(const ReferenceSignal& signal) {
    const auto format = [](double value) {
        char buffer[64];
        auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
        (void)ec;
        return std::string(buffer, ptr);
    };
    std::string out = "t_s,pi\n";
    for (const Breakpoint& bp : signal.breakpoints()) {
        out += format(bp.t_start);
        out += ',';
        out += format(bp.value);
        out += '\n';
    }
    return out;
}

ReferenceSignal load_signal_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open signal file '" + path + "'", 0);
    }
    std::ostringstream contents;
    contents << in.rdbuf();
    return parse_signal(contents.str());
}

ReferenceSignal demo_signal() {
    return ReferenceSignal({
        {0.0, 1.00},
        {1800.0, 0.80},
        {3000.0, 0.90},
        {4800.0, 1.10},
        {6600.0, 1.20},
        {8400.0, 1.05},
        {10200.0, 0.90},
        {12000.0, 1.00},
        {13800.0, 0.85},
        {15000.0, 1.08},
        {16200.0, 1.00},
    });
}

}  // namespace tclsim
