#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>

#include "ombell/types.hpp"

namespace ombell {

enum class StepMethod { DormandPrince, RungeKutta4 };

struct IntegratorOptions {
    StepMethod method = StepMethod::DormandPrince;
    double rtol = 1e-8;
    // Absolute floor per component. Heralding lives in matrix elements many orders
    // below the largest ones, so this has to sit far below rtol.
    double atol = 1e-16;
    double initial_step = 0.0;  // 0: pick automatically
    double max_step = std::numeric_limits<double>::infinity();
    double min_step = 1e-10;    // below this we call the problem stiff
    double fixed_step = 5e-3;   // RK4 only
    std::size_t max_steps = 20'000'000;
};

struct IntegrationStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_calls = 0;
};

using RhsFunction = std::function<void(double t, const Vec& y, Vec& dydt)>;
using SampleFunction = std::function<void(double t, const Vec& y)>;

// Advances y from t0 through every entry of sample_times (ascending, >= t0), landing
// on each exactly and invoking on_sample there. Leaves y at the last sample.
IntegrationStats integrate(const RhsFunction& rhs, Vec& y, double t0, std::span<const double> sample_times,
                           const SampleFunction& on_sample, const IntegratorOptions& options);

}  // namespace ombell
