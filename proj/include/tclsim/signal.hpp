#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tclsim {

struct Breakpoint {
    double t_start;  // s
    double value;    // dimensionless reference

    friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/// Piecewise-constant reference. A breakpoint at time b governs times t > b
/// (intervals are left-open, right-closed), so a new value broadcast at b
/// applies to the interval that follows it. The first breakpoint must sit at
/// t = 0 and all values must be >= 0.
class ReferenceSignal {
public:
    explicit ReferenceSignal(std::vector<Breakpoint> breakpoints);

    /// Value governing (t_from, t_to]. Throws std::invalid_argument when the
    /// interval is empty, starts before 0, or straddles a breakpoint --
    /// drivers must split steps at breakpoints so each controller invocation
    /// sees exactly one reference per interval.
    double value_for_interval(double t_from, double t_to) const;

    /// Smallest breakpoint time strictly greater than t, if any.
    std::optional<double> next_breakpoint_after(double t) const;

    const std::vector<Breakpoint>& breakpoints() const { return breakpoints_; }

private:
    std::vector<Breakpoint> breakpoints_;
};

/// Parses the two-column CSV form (header `t_s,pi`). Throws ParseError with
/// a 1-based line number on malformed rows, non-monotone times, a missing
/// t = 0 row or negative values.
ReferenceSignal parse_signal(std::string_view text);

/// Inverse of parse_signal; round-trips breakpoints exactly.
std::string serialize_signal(const ReferenceSignal& signal);

/// Reads and parses a signal file. Throws ParseError when the file cannot
/// be read.
ReferenceSignal load_signal_file(const std::string& path);

/// Built-in 5 h demonstration profile: steady unit reference, reductions,
/// recoveries above 1 with two mode crossings, and a 30 min unit tail. All
/// values are well inside the admissible power range of the default
/// refrigerator fleet, heterogeneity included.
ReferenceSignal demo_signal();

}  // namespace tclsim
