#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ombell/config.hpp"
#include "ombell/protocol.hpp"

namespace ombell::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitNoClick = 3;

struct WriteRun {
    ModeSpace space;
    WriteTrajectory trajectory;
    std::vector<HeraldPoint> heralds;
    std::optional<std::size_t> best;  // herald point used for t_P
};

WriteRun execute_write(const RunConfig& config);

// Readout initial state for the configured init kind. "heralded" runs the write
// stage (or reuses `write` when given) and takes the state at the chosen t_P.
SemiclassicalState readout_initial(const RunConfig& config, const WriteRun* write = nullptr);

FringeScan execute_fringe(const RunConfig& config, const SemiclassicalState& init);

enum class SweepAxis { Thermal, Dephasing };

struct SweepRow {
    double axis_value = 0.0;
    double concurrence = 0.0;
    double visibility = 0.0;  // NaN when the fringe fit failed or nothing clicked
    double herald_time = 0.0;
    std::string note;
};

std::vector<SweepRow> execute_sweep(const RunConfig& config, SweepAxis axis);

// Fixed-format number used in every CSV cell; NaN prints as "nan".
std::string fmt(double value);

// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ombell::cli
