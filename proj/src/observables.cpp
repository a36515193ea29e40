#include "ombell/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ombell/errors.hpp"

namespace ombell {

Mat partial_trace(const Mat& rho, const ModeSpace& space, std::vector<Mode> keep) {
    if (keep.empty()) throw DomainError("partial trace needs at least one kept mode");
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    const auto n = space.total_dim();
    if (rho.rows() != n || rho.cols() != n) throw DomainError("state does not match mode space");

    std::array<bool, kModeCount> kept{};
    for (Mode m : keep) kept[static_cast<std::size_t>(m)] = true;

    // Split each basis index into (kept index, traced index).
    std::vector<Eigen::Index> kidx(static_cast<std::size_t>(n)), tidx(static_cast<std::size_t>(n));
    Eigen::Index kdim = 1;
    for (Mode m : keep) kdim *= space.dim(m);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Occupation occ = space.occupation_of(i);
        Eigen::Index k = 0, r = 0;
        for (std::size_t m = 0; m < kModeCount; ++m) {
            if (kept[m]) k = k * space.dims()[m] + occ[m];
            else r = r * space.dims()[m] + occ[m];
        }
        kidx[static_cast<std::size_t>(i)] = k;
        tidx[static_cast<std::size_t>(i)] = r;
    }
    Mat out = Mat::Zero(kdim, kdim);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            if (tidx[static_cast<std::size_t>(i)] == tidx[static_cast<std::size_t>(j)])
                out(kidx[static_cast<std::size_t>(i)], kidx[static_cast<std::size_t>(j)]) += rho(i, j);
    return out;
}

TwoQubitState two_qubit_restrict(const Mat& rho_m, int dim1, int dim2, double floor) {
    if (dim1 < 2 || dim2 < 2 || rho_m.rows() != dim1 * dim2 || rho_m.cols() != dim1 * dim2)
        throw DomainError("mechanical state shape does not match the truncation");
    const int idx[4] = {0, 1, dim2, dim2 + 1};
    TwoQubitState q;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) q.rho(r, c) = rho_m(idx[r], idx[c]);
    const double weight = q.rho.trace().real();
    if (!(weight > floor)) throw DegenerateStateError("no weight in the two-qubit block");
    q.rho /= weight;
    q.rho = 0.5 * (q.rho + q.rho.adjoint()).eval();
    q.retained_probability = std::min(1.0, weight / rho_m.trace().real());
    return q;
}

namespace {

Eigen::Matrix4d spin_flip() {
    Eigen::Matrix4d y = Eigen::Matrix4d::Zero();
    y(0, 3) = -1.0;
    y(1, 2) = 1.0;
    y(2, 1) = 1.0;
    y(3, 0) = -1.0;
    return y;
}

}  // namespace

double concurrence(const TwoQubitState& q) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(q.rho);
    const Eigen::Vector4d& p = es.eigenvalues();
    // Eigenvalues at round-off level are zero for all practical purposes; keeping
    // them would inject sqrt(eps) noise into the lambdas.
    const double cut = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, p.cwiseAbs().maxCoeff());
    std::vector<int> cols;
    for (int i = 0; i < 4; ++i)
        if (p(i) > cut) cols.push_back(i);
    if (cols.empty()) return 0.0;
    Eigen::MatrixXcd v(4, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k)
        v.col(static_cast<Eigen::Index>(k)) = std::sqrt(p(cols[k])) * es.eigenvectors().col(cols[k]);
    const Eigen::MatrixXcd tau = v.transpose() * spin_flip().cast<cplx>() * v;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(tau);
    Eigen::Vector4d lambda = Eigen::Vector4d::Zero();
    const auto& s = svd.singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i) lambda(i) = s(i);
    std::sort(lambda.data(), lambda.data() + 4, std::greater<>());
    return std::clamp(lambda(0) - lambda(1) - lambda(2) - lambda(3), 0.0, 1.0);
}

double concurrence_eigen_route(const Eigen::Matrix4cd& rho) {
    const Eigen::Matrix4cd y = spin_flip().cast<cplx>();
    const Eigen::Matrix4cd r = rho * y * rho.conjugate() * y;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(r, false);
    std::array<double, 4> lambda{};
    for (int i = 0; i < 4; ++i) lambda[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
    std::sort(lambda.begin(), lambda.end(), std::greater<>());
    return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

namespace {

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// <(a^dag)^p a^q> of the fluctuation operator.
cplx plain_moment(const Mat& rho, const ModeSpace& space, Mode mode, int p, int q) {
    SpMat op = space.identity().sparse();
    for (int i = 0; i < p; ++i) op = SpMat(op * space.creation(mode));
    for (int i = 0; i < q; ++i) op = SpMat(op * space.annihilation(mode));
    cplx acc{};
    for (Eigen::Index i = 0; i < op.outerSize(); ++i)
        for (SpMat::InnerIterator it(op, i); it; ++it) acc += it.value() * rho(it.col(), it.row());
    return acc;
}

}  // namespace

Moment displaced_normal_moment(const Mat& rho, const ModeSpace& space, cplx z, Mode mode, int k, int l) {
    if (k < 0 || l < 0) throw DomainError("moment powers must be non-negative");
    Moment m;
    m.truncation_warning = std::max(k, l) > space.dim(mode) - 1;
    for (int p = 0; p <= k; ++p)
        for (int q = 0; q <= l; ++q) {
            const cplx coeff = binomial(k, p) * binomial(l, q) * std::pow(std::conj(z), k - p) * std::pow(z, l - q);
            m.value += coeff * ((p == 0 && q == 0) ? rho.trace() : plain_moment(rho, space, mode, p, q));
        }
    return m;
}

G2 g2_zero_delay(const Mat& rho, const ModeSpace& space, cplx z, Mode mode) {
    G2 g;
    g.intensity = displaced_normal_moment(rho, space, z, mode, 1, 1).value.real();
    if (!(g.intensity > kG2IntensityFloor)) return g;
    const double fourth = displaced_normal_moment(rho, space, z, mode, 2, 2).value.real();
    g.value = std::max(0.0, fourth) / (g.intensity * g.intensity);
    g.defined = true;
    return g;
}

namespace {

struct LinearFit {
    double c0 = 0, c1 = 0, c2 = 0, rms = 0;
};

LinearFit fit_fixed(std::span<const double> t, std::span<const double> y, double omega) {
    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double ti = t[static_cast<std::size_t>(i)];
        a(i, 0) = 1.0;
        a(i, 1) = std::cos(omega * ti);
        a(i, 2) = std::sin(omega * ti);
        b(i) = y[static_cast<std::size_t>(i)];
    }
    const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
    LinearFit f{c(0), c(1), c(2), 0.0};
    f.rms = std::sqrt((a * c - b).squaredNorm() / static_cast<double>(n));
    return f;
}

void check_series(std::span<const double> t, std::span<const double> y) {
    if (t.size() != y.size()) throw DomainError("time and intensity series differ in length");
    if (t.size() < 3) throw FitError("need at least 3 points to fit a fringe");
    for (double v : y)
        if (!std::isfinite(v)) throw FitError("non-finite intensity in fringe series");
}

}  // namespace

VisibilityFit visibility(std::span<const double> t, std::span<const double> y, double omega) {
    check_series(t, y);
    if (!(omega > 0.0)) throw DomainError("beat frequency must be positive");
    const auto [tmin, tmax] = std::minmax_element(t.begin(), t.end());
    if (t.size() < 8 || (*tmax - *tmin) < 1.5 * 2.0 * std::numbers::pi / omega)
        throw DomainError("fringe fit needs >= 8 points spanning >= 1.5 beat periods");
    const LinearFit f = fit_fixed(t, y, omega);
    VisibilityFit v;
    v.omega = omega;
    v.mean = f.c0;
    const double amp = std::hypot(f.c1, f.c2);
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    v.extrema_visibility = (*hi + *lo) > 0.0 ? (*hi - *lo) / (*hi + *lo) : 0.0;
    if (!(f.c0 > 0.0)) {
        throw FitError("fringe fit gave non-positive mean intensity (rms residual " + std::to_string(f.rms) + ")");
    }
    v.visibility = amp / f.c0;
    // I0 V cos(wt + phi) = c1 cos wt + c2 sin wt  =>  phi = atan2(-c2, c1)
    v.phase = std::atan2(-f.c2, f.c1);
    v.residual = f.rms / f.c0;
    const double scale = std::max(std::abs(*hi), std::abs(*lo));
    v.confident = amp > 1e-9 * scale && f.rms < 0.5 * amp;
    return v;
}

FrequencyFit free_frequency_fit(std::span<const double> t, std::span<const double> y, double lo, double hi) {
    check_series(t, y);
    if (!(hi > lo && lo > 0.0)) throw DomainError("frequency bracket must be positive and ordered");
    auto cost = [&](double w) { return fit_fixed(t, y, w).rms; };
    constexpr int kGrid = 400;
    double best_w = lo, best_c = cost(lo);
    for (int i = 1; i <= kGrid; ++i) {
        const double w = lo + (hi - lo) * i / kGrid;
        const double c = cost(w);
        if (c < best_c) {
            best_c = c;
            best_w = w;
        }
    }
    const double step = (hi - lo) / kGrid;
    double a = std::max(lo, best_w - step), b = std::min(hi, best_w + step);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = cost(x1), f2 = cost(x2);
    for (int it = 0; it < 100 && (b - a) > 1e-12 * best_w; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = cost(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = cost(x2);
        }
    }
    const double w = 0.5 * (a + b);
    return {w, cost(w)};
}

}  // namespace ombell
