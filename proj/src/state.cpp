#include "ombell/state.hpp"

#include <cmath>

#include "ombell/errors.hpp"

namespace ombell {

cplx& Amplitudes::operator[](Mode m) {
    switch (m) {
        case Mode::Cavity: return cavity;
        case Mode::Mech1: return mech1;
        case Mode::Mech2: return mech2;
        case Mode::Detector: break;
    }
    return detector;
}

cplx Amplitudes::operator[](Mode m) const { return const_cast<Amplitudes&>(*this)[m]; }

StateDiagnostics diagnose(const Mat& rho, bool with_spectrum) {
    StateDiagnostics d;
    d.trace_error = std::abs(rho.trace() - cplx(1.0));
    d.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (with_spectrum) {
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
        d.min_eigenvalue = es.eigenvalues().minCoeff();
    }
    return d;
}

QuantumState vacuum_state(const ModeSpace& space) {
    const auto n = space.total_dim();
    QuantumState s{Mat::Zero(n, n), 0.0};
    s.rho(0, 0) = 1.0;
    return s;
}

Eigen::VectorXd thermal_populations(double mean, int levels) {
    if (!(mean >= 0.0)) throw ParameterError("thermal occupation must be >= 0");
    Eigen::VectorXd p(levels);
    const double ratio = mean / (1.0 + mean);
    double w = 1.0 / (1.0 + mean);
    for (int n = 0; n < levels; ++n) {
        p(n) = w;
        w *= ratio;
    }
    return p / p.sum();
}

Mat embed_mechanical(const ModeSpace& space, const Mat& rho_m) {
    const int d1 = space.dim(Mode::Mech1);
    const int d2 = space.dim(Mode::Mech2);
    if (rho_m.rows() != d1 * d2 || rho_m.cols() != d1 * d2)
        throw DomainError("mechanical state does not match the mechanical truncation");
    const auto n = space.total_dim();
    Mat rho = Mat::Zero(n, n);
    for (int i = 0; i < d1 * d2; ++i)
        for (int j = 0; j < d1 * d2; ++j) {
            const auto r = space.index_of({0, i / d2, i % d2, 0});
            const auto c = space.index_of({0, j / d2, j % d2, 0});
            rho(r, c) = rho_m(i, j);
        }
    return rho;
}

QuantumState thermal_state(const ModeSpace& space, double n_mech1, double n_mech2) {
    const Eigen::VectorXd p1 = thermal_populations(n_mech1, space.dim(Mode::Mech1));
    const Eigen::VectorXd p2 = thermal_populations(n_mech2, space.dim(Mode::Mech2));
    const auto d2 = p2.size();
    Mat rho_m = Mat::Zero(p1.size() * d2, p1.size() * d2);
    for (Eigen::Index i = 0; i < p1.size(); ++i)
        for (Eigen::Index j = 0; j < d2; ++j) rho_m(i * d2 + j, i * d2 + j) = p1(i) * p2(j);
    return {embed_mechanical(space, rho_m), 0.0};
}

cplx expectation(const SpMat& op, const Mat& rho) {
    // Tr(op rho) without forming the product.
    cplx acc{};
    for (Eigen::Index i = 0; i < op.outerSize(); ++i)
        for (SpMat::InnerIterator it(op, i); it; ++it) acc += it.value() * rho(it.col(), it.row());
    return acc;
}

double expectation_real(const SpMat& op, const Mat& rho) { return expectation(op, rho).real(); }

std::array<double, kModeCount> occupations(const ModeSpace& space, const Mat& rho) {
    std::array<double, kModeCount> out{};
    for (Mode m : kAllModes) out[static_cast<std::size_t>(m)] = expectation_real(space.number(m), rho);
    return out;
}

}  // namespace ombell
