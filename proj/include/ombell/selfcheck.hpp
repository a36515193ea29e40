#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ombell/config.hpp"
#include "ombell/protocol.hpp"

namespace ombell {

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;      // measured quantity
    double threshold = 0.0;  // bound it was compared against
    std::string detail;
};

struct SelfcheckReport {
    std::vector<CheckResult> checks;
    bool all_passed() const;
};

struct SelfcheckOptions {
    int random_states = 1000;
    bool include_truncation = true;  // the [4,4,4,3] write run dominates the cost
    bool include_gauge = true;
    std::vector<int> refined_dims{4, 4, 4, 3};
};

// Invariant and property suite: trace, Hermiticity, positivity, Ehrenfest, detailed
// balance, weak drive, concurrence oracles, V = C/(2-C), coupling-sign gauge, truncation.
SelfcheckReport run_selfcheck(const RunConfig& config, const SelfcheckOptions& options = {});

// Pieces exposed for tests and the acceptance binary.
CheckResult check_ehrenfest(const RunConfig& config);
CheckResult check_detailed_balance(const RunConfig& config);
CheckResult check_concurrence_formula(std::uint64_t seed, int count);
CheckResult check_concurrence_oracle_mixed(std::uint64_t seed, int count);
CheckResult check_visibility_law(std::uint64_t seed, int count);

struct WriteSummary;
class ModeSpace;
// Multi-phonon weight of the conditional state must stay small at the herald time.
CheckResult check_weak_drive(const WriteSummary& summary, const ModeSpace& space, double herald_time);

// Maximum heralded concurrence over a write run.
struct WriteSummary {
    double c_max = 0.0;
    double t_at_max = 0.0;
    double n_c_at_max = 0.0;
    double max_trace_drift = 0.0;
    double max_hermiticity_defect = 0.0;
    double min_eigenvalue = 0.0;
    WriteTrajectory trajectory;
    std::vector<HeraldPoint> heralds;
};

WriteSummary summarize_write(const ModeSpace& space, const SystemParams& params, const ProtocolSchedule& schedule,
                             const QuantumState& initial, const PropagationOptions& options, bool track_spectrum);

}  // namespace ombell
