#include "ombell/mode_space.hpp"

#include <cmath>
#include <string>

#include "ombell/errors.hpp"

namespace ombell {

namespace {

constexpr double kHermitianTolerance = 1e-12;

SpMat single_mode(int dim, LadderKind kind) {
    std::vector<Eigen::Triplet<cplx>> entries;
    for (int n = 0; n + 1 < dim; ++n) {
        const double amp = std::sqrt(static_cast<double>(n + 1));
        switch (kind) {
            case LadderKind::Annihilation: entries.emplace_back(n, n + 1, amp); break;
            case LadderKind::Creation: entries.emplace_back(n + 1, n, amp); break;
            case LadderKind::Number: break;
        }
    }
    if (kind == LadderKind::Number) {
        for (int n = 1; n < dim; ++n) entries.emplace_back(n, n, static_cast<double>(n));
    }
    SpMat m(dim, dim);
    m.setFromTriplets(entries.begin(), entries.end());
    return m;
}

SpMat sparse_identity(Eigen::Index n) {
    SpMat m(n, n);
    m.setIdentity();
    return m;
}

SpMat kron(const SpMat& a, const SpMat& b) {
    std::vector<Eigen::Triplet<cplx>> entries;
    entries.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
    for (Eigen::Index i = 0; i < a.outerSize(); ++i)
        for (SpMat::InnerIterator ia(a, i); ia; ++ia)
            for (Eigen::Index j = 0; j < b.outerSize(); ++j)
                for (SpMat::InnerIterator ib(b, j); ib; ++ib)
                    entries.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                                         ia.value() * ib.value());
    SpMat out(a.rows() * b.rows(), a.cols() * b.cols());
    out.setFromTriplets(entries.begin(), entries.end());
    return out;
}

}  // namespace

double hermiticity_defect(const SpMat& m) {
    SpMat diff = m - SpMat(m.adjoint());
    double worst = 0.0;
    for (Eigen::Index k = 0; k < diff.outerSize(); ++k)
        for (SpMat::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    return worst;
}

OperatorMatrix::OperatorMatrix(SpMat matrix, bool hermitian)
    : matrix_(std::move(matrix)), hermitian_(hermitian) {
    if (matrix_.rows() != matrix_.cols()) throw DomainError("operator matrix must be square");
    matrix_.makeCompressed();
    if (hermitian_ && hermiticity_defect(matrix_) >= kHermitianTolerance)
        throw IntegrityError("operator tagged Hermitian fails the Hermiticity check");
}

OperatorMatrix OperatorMatrix::adjoint() const { return OperatorMatrix(SpMat(matrix_.adjoint()), hermitian_); }

Mode mode_from_index(int index) {
    if (index < 0 || index >= static_cast<int>(kModeCount))
        throw DomainError("mode index " + std::to_string(index) + " out of range [0,4)");
    return static_cast<Mode>(index);
}

const char* mode_name(Mode mode) {
    switch (mode) {
        case Mode::Cavity: return "cavity";
        case Mode::Mech1: return "mech1";
        case Mode::Mech2: return "mech2";
        case Mode::Detector: return "detector";
    }
    return "?";
}

ModeSpace::ModeSpace(Dims dims, std::size_t max_total_dim) : dims_(dims) {
    Eigen::Index total = 1;
    for (int d : dims_) {
        if (d < 2) throw ParameterError("every mode needs at least 2 Fock levels");
        total *= d;
    }
    if (static_cast<std::size_t>(total) > max_total_dim)
        throw CapacityError("total dimension " + std::to_string(total) + " exceeds cap " +
                            std::to_string(max_total_dim));
    total_ = total;

    Eigen::Index stride = 1;
    for (int k = static_cast<int>(kModeCount) - 1; k >= 0; --k) {
        strides_[static_cast<std::size_t>(k)] = stride;
        stride *= dims_[static_cast<std::size_t>(k)];
    }

    identity_ = OperatorMatrix(sparse_identity(total_), true);
    for (Mode mode : kAllModes) {
        const auto m = static_cast<std::size_t>(mode);
        for (LadderKind kind : {LadderKind::Annihilation, LadderKind::Creation, LadderKind::Number}) {
            SpMat full(1, 1);
            full.insert(0, 0) = 1.0;
            for (std::size_t k = 0; k < kModeCount; ++k)
                full = kron(full, k == m ? single_mode(dims_[k], kind) : sparse_identity(dims_[k]));
            cache_.emplace(std::make_pair(mode, kind),
                           OperatorMatrix(std::move(full), kind == LadderKind::Number));
        }
    }
}

const OperatorMatrix& ModeSpace::op(Mode mode, LadderKind kind) const { return cache_.at({mode, kind}); }

OperatorMatrix ModeSpace::projector(Mode mode, int level) const {
    if (level < 0 || level >= dim(mode))
        throw DomainError("Fock level " + std::to_string(level) + " outside truncation of " +
                          mode_name(mode));
    std::vector<Eigen::Triplet<cplx>> entries;
    for (Eigen::Index i = 0; i < total_; ++i)
        if (occupation_of(i)[static_cast<std::size_t>(mode)] == level) entries.emplace_back(i, i, 1.0);
    SpMat p(total_, total_);
    p.setFromTriplets(entries.begin(), entries.end());
    return OperatorMatrix(std::move(p), true);
}

Eigen::Index ModeSpace::index_of(const Occupation& occ) const {
    Eigen::Index idx = 0;
    for (std::size_t k = 0; k < kModeCount; ++k) {
        if (occ[k] < 0 || occ[k] >= dims_[k]) throw DomainError("occupation outside truncation");
        idx += occ[k] * strides_[k];
    }
    return idx;
}

Occupation ModeSpace::occupation_of(Eigen::Index index) const {
    if (index < 0 || index >= total_) throw DomainError("basis index out of range");
    Occupation occ{};
    for (std::size_t k = 0; k < kModeCount; ++k) {
        occ[k] = static_cast<int>(index / strides_[k]);
        index %= strides_[k];
    }
    return occ;
}

ModeSpace build_mode_space(const std::vector<int>& dims, std::size_t max_total_dim) {
    if (dims.size() != kModeCount) throw ParameterError("dims must list exactly four modes");
    Dims d{};
    std::copy(dims.begin(), dims.end(), d.begin());
    return ModeSpace(d, max_total_dim);
}

OperatorMatrix ladder_operator(const ModeSpace& space, int mode, LadderKind kind) {
    return space.op(mode_from_index(mode), kind);
}

OperatorMatrix embed_projector(const ModeSpace& space, int mode, int level) {
    return space.projector(mode_from_index(mode), level);
}

}  // namespace ombell
