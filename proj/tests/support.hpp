#pragma once

// Randomized fixtures shared across the test files. Engines are seeded per
// test so failures reproduce.

#include <weakmeas/weakmeas.hpp>

#include <random>
#include <utility>

namespace wmtest {

using namespace weakmeas;

inline Mat random_matrix(Eigen::Index dim, std::mt19937_64& eng) {
    std::normal_distribution<double> gauss;
    Mat a(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r)
        for (Eigen::Index c = 0; c < dim; ++c) a(r, c) = Complex(gauss(eng), gauss(eng));
    return a;
}

inline Vec random_unit(Eigen::Index dim, std::mt19937_64& eng) {
    std::normal_distribution<double> gauss;
    Vec v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = Complex(gauss(eng), gauss(eng));
    return v / v.norm();
}

inline Mat random_unitary(Eigen::Index dim, std::mt19937_64& eng) {
    const Eigen::HouseholderQR<Mat> qr(random_matrix(dim, eng));
    Mat q = qr.householderQ();
    return q;
}

inline Mat random_hermitian(Eigen::Index dim, std::mt19937_64& eng) {
    const Mat a = random_matrix(dim, eng);
    return 0.5 * (a + a.adjoint());
}

// Orthogonal projector pair built from disjoint column blocks of one unitary.
inline std::pair<Mat, Mat> random_orthogonal_projectors(Eigen::Index dim, std::mt19937_64& eng,
                                                        Eigen::Index rank_o = 1,
                                                        Eigen::Index rank_1 = 1) {
    const Mat u = random_unitary(dim, eng);
    const Mat bo = u.leftCols(rank_o);
    const Mat b1 = u.middleCols(rank_o, rank_1);
    return {bo * bo.adjoint(), b1 * b1.adjoint()};
}

// Random pre/postselected scenario, resampled until the transition amplitude
// is comfortably away from zero so weak values stay well conditioned.
inline Scenario random_scenario(Eigen::Index dim, std::mt19937_64& eng, double min_amp = 1e-3,
                                QuiescentWindow window = {}) {
    for (;;) {
        const Vec in = random_unit(dim, eng);
        const Vec f = random_unit(dim, eng);
        const Mat u1 = random_unitary(dim, eng);
        const Mat u2 = random_unitary(dim, eng);
        if (std::abs(f.dot(u2 * (u1 * in))) < min_amp) continue;
        return Scenario(StateVector(in), u1, u2, StateVector(f), std::move(window));
    }
}

}  // namespace wmtest
