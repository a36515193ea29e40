#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ombell/integrator.hpp"
#include "ombell/mode_space.hpp"
#include "ombell/params.hpp"
#include "ombell/state.hpp"

namespace ombell {

struct Jump {
    double rate = 0.0;  // standard-form rate: rate * (L rho L^dag - {L^dag L, rho}/2)
    SpMat op;
    SpMat op_adj;
};

// Time-independent dissipative part of the generator. The right-hand side is
// assembled as Y + Y^dagger with
//     Y = M rho + sum_k (r_k/2) L_k rho L_k^dag + (zeta/2) a rho d^dag,
// where M = -iH + drift(). This keeps every derivative exactly Hermitian, so the
// integrated state cannot pick up an anti-Hermitian part from round-off.
class Dissipation {
public:
    // bare_cavity_dephasing: include eta D[a^dag a] with the bare cavity number
    // operator (full-quantum runs). The displaced readout frame handles dephasing
    // itself and passes false.
    Dissipation(const ModeSpace& space, const SystemParams& params, bool bare_cavity_dephasing);

    const SpMat& drift() const { return drift_; }
    const std::vector<Jump>& jumps() const { return jumps_; }

    // Y += sum (r/2) L rho L^dag + (zeta/2) a rho d^dag
    void add_sandwich_terms(const Mat& rho, Mat& Y, Mat& scratch) const;

private:
    std::vector<Jump> jumps_;
    SpMat drift_;
    SpMat cavity_;
    SpMat detector_adj_;
    double zeta_ = 0.0;
};

// Rotating-frame Hamiltonian. With classical amplitudes, the displaced
// fluctuation Hamiltonian (drive removed, coupling -g convention).
OperatorMatrix assemble_hamiltonian(const ModeSpace& space, const SystemParams& params,
                                    std::span<const PulseSpec> pulses, double t,
                                    const Amplitudes* classical = nullptr);

// Full generator applied to rho for a given Hamiltonian; traceless and Hermitian.
Mat lindblad_rhs(const ModeSpace& space, const SystemParams& params, const Mat& rho, const OperatorMatrix& H);

struct PropagationOptions {
    IntegratorOptions integrator;
    bool check_positivity = false;
    double trace_tolerance = 1e-8;
    double hermiticity_tolerance = 1e-10;
    double positivity_tolerance = 1e-8;
};

using StateObserver = std::function<void(const QuantumState&)>;

// Integrates the full master equation under the given pulses, reporting the state
// at each sample time. Returns integrator statistics.
IntegrationStats propagate(const ModeSpace& space, const SystemParams& params, std::span<const PulseSpec> pulses,
                           const QuantumState& initial, std::span<const double> sample_times,
                           const StateObserver& observer, const PropagationOptions& options = {});

// Convenience: keep every sampled state.
std::vector<QuantumState> propagate_all(const ModeSpace& space, const SystemParams& params,
                                        std::span<const PulseSpec> pulses, const QuantumState& initial,
                                        std::span<const double> sample_times,
                                        const PropagationOptions& options = {});

// Checks the state invariants; throws IntegrityError with context on failure.
void enforce_invariants(const Mat& rho, double reference_trace, const PropagationOptions& options, double t);

}  // namespace ombell
