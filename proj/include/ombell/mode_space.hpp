#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "ombell/types.hpp"

namespace ombell {

// Fixed mode order; the basis index is row-major over these.
enum class Mode : int { Cavity = 0, Mech1 = 1, Mech2 = 2, Detector = 3 };

inline constexpr std::size_t kModeCount = 4;
inline constexpr std::array<Mode, kModeCount> kAllModes{Mode::Cavity, Mode::Mech1, Mode::Mech2,
                                                       Mode::Detector};

// Throws DomainError for anything outside [0, 4).
Mode mode_from_index(int index);
const char* mode_name(Mode mode);

enum class LadderKind { Annihilation, Creation, Number };

using Dims = std::array<int, kModeCount>;
using Occupation = std::array<int, kModeCount>;

// Sparse storage with a verified Hermitian tag. Ladder operators have at most one
// entry per row, so sparse products beat dense ones by a wide margin here.
class OperatorMatrix {
public:
    OperatorMatrix() = default;
    OperatorMatrix(SpMat matrix, bool hermitian);

    const SpMat& sparse() const { return matrix_; }
    Mat dense() const { return Mat(matrix_); }
    bool hermitian() const { return hermitian_; }
    Eigen::Index dim() const { return matrix_.rows(); }

    OperatorMatrix adjoint() const;

private:
    SpMat matrix_;
    bool hermitian_ = false;
};

class ModeSpace {
public:
    static constexpr std::size_t kDefaultCap = 256;

    explicit ModeSpace(Dims dims, std::size_t max_total_dim = kDefaultCap);

    const Dims& dims() const { return dims_; }
    int dim(Mode mode) const { return dims_[static_cast<std::size_t>(mode)]; }
    Eigen::Index total_dim() const { return total_; }

    const OperatorMatrix& op(Mode mode, LadderKind kind) const;
    const SpMat& annihilation(Mode mode) const { return op(mode, LadderKind::Annihilation).sparse(); }
    const SpMat& creation(Mode mode) const { return op(mode, LadderKind::Creation).sparse(); }
    const SpMat& number(Mode mode) const { return op(mode, LadderKind::Number).sparse(); }
    const OperatorMatrix& identity() const { return identity_; }

    OperatorMatrix projector(Mode mode, int level) const;

    Eigen::Index index_of(const Occupation& occ) const;
    Occupation occupation_of(Eigen::Index index) const;

private:
    Dims dims_;
    Eigen::Index total_ = 0;
    std::array<Eigen::Index, kModeCount> strides_{};
    OperatorMatrix identity_;
    std::map<std::pair<Mode, LadderKind>, OperatorMatrix> cache_;
};

ModeSpace build_mode_space(const std::vector<int>& dims,
                           std::size_t max_total_dim = ModeSpace::kDefaultCap);
OperatorMatrix ladder_operator(const ModeSpace& space, int mode, LadderKind kind);
OperatorMatrix embed_projector(const ModeSpace& space, int mode, int level);

// Hermiticity measure used by the OperatorMatrix tag.
double hermiticity_defect(const SpMat& m);

}  // namespace ombell
