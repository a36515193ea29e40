#include "ombell/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ombell/errors.hpp"

namespace ombell {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double error_norm(const Vec& err, const Vec& y0, const Vec& y1, double rtol, double atol) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double scale = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        worst = std::max(worst, std::abs(err[i]) / scale);
    }
    return worst;
}

class DormandPrince {
public:
    DormandPrince(const RhsFunction& rhs, const IntegratorOptions& opt, IntegrationStats& stats, Eigen::Index n)
        : rhs_(rhs), opt_(opt), stats_(stats), k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), err(n) {}

    void start(double t, const Vec& y) {
        call(t, y, k1);
        if (opt_.initial_step > 0.0) {
            h_ = opt_.initial_step;
            return;
        }
        // Hairer-Wanner starting guess, order 5.
        double d0 = 0.0, d1 = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc = opt_.atol + opt_.rtol * std::abs(y[i]);
            d0 = std::max(d0, std::abs(y[i]) / sc);
            d1 = std::max(d1, std::abs(k1[i]) / sc);
        }
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, opt_.max_step);
        tmp = y + h0 * k1;
        call(t + h0, tmp, k2);
        double d2 = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc = opt_.atol + opt_.rtol * std::abs(y[i]);
            d2 = std::max(d2, std::abs(k2[i] - k1[i]) / sc);
        }
        d2 /= h0;
        const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                      : std::pow(0.01 / std::max(d1, d2), 1.0 / 5.0);
        h_ = std::min({100.0 * h0, h1, opt_.max_step});
    }

    // Advance to exactly t_target.
    void advance(double& t, Vec& y, double t_target) {
        while (t < t_target) {
            if (++steps_ > opt_.max_steps) throw StiffnessError("step budget exhausted");
            double h = std::min(h_, opt_.max_step);
            bool clamped = false;
            if (t + h >= t_target || t_target - (t + h) < 1e-12 * std::max(1.0, std::abs(t_target))) {
                h = t_target - t;
                clamped = true;
            }
            if (h < opt_.min_step && !clamped) {
                std::ostringstream os;
                os << "step size underflow at t=" << t << " ns (h=" << h << ")";
                throw StiffnessError(os.str());
            }
            tmp = y + h * (a21 * k1);
            call(t + c2 * h, tmp, k2);
            tmp = y + h * (a31 * k1 + a32 * k2);
            call(t + c3 * h, tmp, k3);
            tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
            call(t + c4 * h, tmp, k4);
            tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            call(t + c5 * h, tmp, k5);
            tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            call(t + h, tmp, k6);
            tmp = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            call(t + h, tmp, k7);
            err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const double norm = error_norm(err, y, tmp, opt_.rtol, opt_.atol);
            if (!std::isfinite(norm)) {
                ++stats_.rejected;
                h_ = 0.2 * h;
                if (h_ < opt_.min_step) throw StiffnessError("non-finite derivative during integration");
                continue;
            }
            if (norm <= 1.0) {
                ++stats_.accepted;
                t = clamped ? t_target : t + h;
                y.swap(tmp);
                k1.swap(k7);  // first-same-as-last
                // PI-free classic controller; only grow from the unclamped step.
                const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
                const double proposal = h * factor;
                h_ = clamped ? std::max(h_, proposal) : proposal;
            } else {
                ++stats_.rejected;
                h_ = h * std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 1.0);
                if (h_ < opt_.min_step) {
                    std::ostringstream os;
                    os << "step size underflow at t=" << t << " ns (h=" << h_ << ")";
                    throw StiffnessError(os.str());
                }
            }
        }
    }

private:
    void call(double t, const Vec& y, Vec& out) {
        ++stats_.rhs_calls;
        rhs_(t, y, out);
    }

    const RhsFunction& rhs_;
    const IntegratorOptions& opt_;
    IntegrationStats& stats_;
    double h_ = 0.0;
    std::size_t steps_ = 0;
    Vec k1, k2, k3, k4, k5, k6, k7, tmp, err;
};

void rk4_advance(const RhsFunction& rhs, const IntegratorOptions& opt, IntegrationStats& stats, double& t, Vec& y,
                 double t_target) {
    const double span = t_target - t;
    if (span <= 0.0) return;
    const auto steps = static_cast<std::size_t>(std::ceil(span / opt.fixed_step - 1e-9));
    const double h = span / static_cast<double>(steps);
    Vec k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), tmp(y.size());
    for (std::size_t s = 0; s < steps; ++s) {
        rhs(t, y, k1);
        tmp = y + 0.5 * h * k1;
        rhs(t + 0.5 * h, tmp, k2);
        tmp = y + 0.5 * h * k2;
        rhs(t + 0.5 * h, tmp, k3);
        tmp = y + h * k3;
        rhs(t + h, tmp, k4);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = (s + 1 == steps) ? t_target : t + h;
        stats.rhs_calls += 4;
        ++stats.accepted;
    }
}

}  // namespace

IntegrationStats integrate(const RhsFunction& rhs, Vec& y, double t0, std::span<const double> sample_times,
                           const SampleFunction& on_sample, const IntegratorOptions& options) {
    if (!(options.rtol > 0.0) || !(options.atol > 0.0)) throw ParameterError("tolerances must be positive");
    if (!std::is_sorted(sample_times.begin(), sample_times.end()))
        throw DomainError("sample times must be ascending");
    if (!sample_times.empty() && sample_times.front() < t0) throw DomainError("sample time precedes start");

    IntegrationStats stats;
    double t = t0;
    if (options.method == StepMethod::RungeKutta4) {
        if (!(options.fixed_step > 0.0)) throw ParameterError("fixed step must be positive");
        for (double ts : sample_times) {
            rk4_advance(rhs, options, stats, t, y, ts);
            if (on_sample) on_sample(ts, y);
        }
        return stats;
    }

    DormandPrince stepper(rhs, options, stats, y.size());
    bool started = false;
    for (double ts : sample_times) {
        if (ts > t) {
            if (!started) {
                stepper.start(t, y);
                started = true;
            }
            stepper.advance(t, y, ts);
        }
        if (on_sample) on_sample(ts, y);
    }
    return stats;
}

}  // namespace ombell
