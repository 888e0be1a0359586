#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "weakmeas/errors.hpp"

namespace weakmeas {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// Result of applying an operator to a ket; carries no norm guarantee.
using UnnormalizedVector = Vec;

inline constexpr double kNormTol = 1e-10;
inline constexpr double kRoleTol = 1e-10;
inline constexpr double kEigenvalueMergeTol = 1e-8;

// A unit-norm ket. Construction rejects vectors whose squared norm deviates
// from 1 by more than tol; renormalize explicitly via StateVector::normalized.
class StateVector {
public:
    explicit StateVector(Vec amplitudes, double tol = kNormTol) : v_(std::move(amplitudes)) {
        if (v_.size() == 0) throw DimensionError("StateVector: dimension must be positive");
        if (std::abs(v_.squaredNorm() - 1.0) > tol)
            throw NormalizationError("StateVector: squared norm deviates from 1 beyond tolerance");
    }

    static StateVector normalized(const UnnormalizedVector& v) {
        const double n = v.norm();
        if (!(n > 0.0) || !std::isfinite(n))
            throw ZeroNormError("StateVector::normalized: cannot normalize a zero vector");
        return StateVector(v / n);
    }

    static StateVector basis(Eigen::Index dim, Eigen::Index k) {
        if (dim <= 0) throw DimensionError("StateVector::basis: dimension must be positive");
        if (k < 0 || k >= dim) throw IndexError("StateVector::basis: ket index out of range");
        Vec v = Vec::Zero(dim);
        v[k] = 1.0;
        return StateVector(std::move(v));
    }

    Eigen::Index dim() const { return v_.size(); }
    const Vec& amplitudes() const { return v_; }
    Complex operator[](Eigen::Index i) const { return v_[i]; }

private:
    Vec v_;
};

// <bra|ket>, antilinear in the first argument.
inline Complex inner_product(const StateVector& bra, const StateVector& ket) {
    if (bra.dim() != ket.dim()) throw DimensionError("inner_product: dimension mismatch");
    return bra.amplitudes().dot(ket.amplitudes());
}

inline UnnormalizedVector apply_operator(const Mat& op, const StateVector& ket) {
    if (op.rows() != op.cols()) throw DimensionError("apply_operator: operator must be square");
    if (op.cols() != ket.dim()) throw DimensionError("apply_operator: dimension mismatch");
    return op * ket.amplitudes();
}

// |ket><bra|
inline Mat outer_product(const StateVector& ket, const StateVector& bra) {
    if (ket.dim() != bra.dim()) throw DimensionError("outer_product: dimension mismatch");
    return ket.amplitudes() * bra.amplitudes().adjoint();
}

inline Mat identity(Eigen::Index dim) { return Mat::Identity(dim, dim); }

enum class OperatorRole { Unitary, Hermitian, Projector };

// True when op satisfies the role's defining relation entrywise within tol.
inline bool validate(const Mat& op, OperatorRole role, double tol = kRoleTol) {
    if (!(tol > 0.0)) throw std::invalid_argument("validate: tolerance must be positive");
    if (op.rows() != op.cols() || op.rows() == 0) return false;
    const auto deviation = [](const Mat& m) { return m.cwiseAbs().maxCoeff(); };
    switch (role) {
        case OperatorRole::Unitary:
            return deviation(op.adjoint() * op - identity(op.rows())) <= tol;
        case OperatorRole::Hermitian:
            return deviation(op - op.adjoint()) <= tol;
        case OperatorRole::Projector:
            return deviation(op - op.adjoint()) <= tol && deviation(op * op - op) <= tol;
    }
    return false;
}

// Spectral form of a Hermitian operator: distinct eigenvalues in ascending
// order, one orthogonal projector per eigenspace. Eigenvalues closer than the
// merge tolerance are treated as a single degenerate eigenspace.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    std::vector<Mat> projectors;
    std::vector<int> multiplicities;

    std::size_t size() const { return eigenvalues.size(); }
    Eigen::Index dim() const { return projectors.empty() ? 0 : projectors.front().rows(); }

    Mat reconstruct() const {
        Mat m = Mat::Zero(dim(), dim());
        for (std::size_t k = 0; k < eigenvalues.size(); ++k) m += eigenvalues[k] * projectors[k];
        return m;
    }
};

inline SpectralDecomposition spectral_decompose(const Mat& op,
                                                double merge_tol = kEigenvalueMergeTol) {
    if (op.rows() != op.cols() || op.rows() == 0)
        throw DimensionError("spectral_decompose: operator must be square and nonempty");
    if (!validate(op, OperatorRole::Hermitian))
        throw NotHermitianError("spectral_decompose: operator is not Hermitian");

    Eigen::SelfAdjointEigenSolver<Mat> solver(op);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("spectral_decompose: eigensolver failed to converge");
    const Eigen::VectorXd& evals = solver.eigenvalues();  // ascending
    const Mat& evecs = solver.eigenvectors();

    SpectralDecomposition out;
    Eigen::Index start = 0;
    for (Eigen::Index i = 1; i <= evals.size(); ++i) {
        if (i < evals.size() && evals[i] - evals[i - 1] <= merge_tol) continue;
        const Eigen::Index count = i - start;
        const Mat block = evecs.middleCols(start, count);
        out.eigenvalues.push_back(evals.segment(start, count).mean());
        out.projectors.push_back(block * block.adjoint());
        out.multiplicities.push_back(static_cast<int>(count));
        start = i;
    }
    return out;
}

// Exact {0, 1} decomposition of a projector. Avoids eigensolver noise on the
// eigenvalues, so pointer shifts derived from them stay exactly 0 and g.
inline SpectralDecomposition projector_decomposition(const Mat& p, double tol = kRoleTol) {
    if (!validate(p, OperatorRole::Projector, tol))
        throw NotProjectorError("projector_decomposition: operator is not a projector");
    const Eigen::Index dim = p.rows();
    const auto rank = static_cast<Eigen::Index>(std::llround(p.trace().real()));

    SpectralDecomposition out;
    if (rank < dim) {
        out.eigenvalues.push_back(0.0);
        out.projectors.push_back(identity(dim) - p);
        out.multiplicities.push_back(static_cast<int>(dim - rank));
    }
    if (rank > 0) {
        out.eigenvalues.push_back(1.0);
        out.projectors.push_back(p);
        out.multiplicities.push_back(static_cast<int>(rank));
    }
    return out;
}

}  // namespace weakmeas
