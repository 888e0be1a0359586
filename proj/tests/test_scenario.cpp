#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace weakmeas;
using namespace wmtest;
using Catch::Matchers::WithinAbs;

namespace {

// Box basis as the spectral family of a nondegenerate diagonal observable.
SpectralDecomposition box_basis(Eigen::Index dim = 3) {
    Mat m = Mat::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) m(k, k) = static_cast<double>(k);
    return spectral_decompose(m);
}

}  // namespace

TEST_CASE("scenario construction validates its pieces", "[scenario]") {
    const Scenario s = three_box();
    REQUIRE(s.dim() == 3);

    const StateVector in = s.preselected();
    const StateVector f = s.postselected();

    SECTION("orthogonal pre/post pair is rejected") {
        Vec g(3);
        g << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0;
        REQUIRE_THROWS_AS(Scenario(in, identity(3), identity(3), StateVector(g)),
                          VanishingAmplitudeError);
    }
    SECTION("non-unitary segments are rejected by name") {
        REQUIRE_THROWS_WITH(Scenario(in, 2.0 * identity(3), identity(3), f),
                            Catch::Matchers::ContainsSubstring("u_pre fails unitarity"));
        REQUIRE_THROWS_WITH(Scenario(in, identity(3), 2.0 * identity(3), f),
                            Catch::Matchers::ContainsSubstring("u_post fails unitarity"));
    }
    SECTION("dimension mismatches are rejected") {
        REQUIRE_THROWS_AS(Scenario(in, identity(4), identity(3), f), DimensionError);
        REQUIRE_THROWS_AS(Scenario(StateVector::basis(2, 0), identity(2), identity(2),
                                   StateVector::basis(2, 0),
                                   QuiescentWindow{{GaussianMeter(
                                       projector_decomposition(identity(3)), 0.1, 1.0, "x")}}),
                          DimensionError);
    }
}

TEST_CASE("transition amplitude and probability", "[scenario]") {
    const Scenario s = three_box();
    REQUIRE_THAT(transition_amplitude(s).real(), WithinAbs(1.0 / 3.0, 1e-12));
    REQUIRE_THAT(transition_amplitude(s).imag(), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(prob_transition(s), WithinAbs(1.0 / 9.0, 1e-12));

    const StateVector a = StateVector::basis(2, 0);
    const Scenario trivial(a, identity(2), identity(2), a);
    REQUIRE(transition_amplitude(trivial) == Complex(1.0, 0.0));
    REQUIRE(prob_transition(trivial) == 1.0);

    // amplitude composes the two segments around the window
    std::mt19937_64 eng(21);
    for (int rep = 0; rep < 25; ++rep) {
        const Scenario r = random_scenario(4, eng);
        const Complex by_hand = inner_product(
            r.postselected(),
            StateVector::normalized(r.u_post() * (r.u_pre() * r.preselected().amplitudes())));
        REQUIRE_THAT(std::abs(transition_amplitude(r) - by_hand), WithinAbs(0.0, 1e-12));
        REQUIRE_THAT(prob_transition(r) - std::norm(by_hand), WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("intermediate outcome probabilities", "[scenario]") {
    const Scenario s = three_box();
    const SpectralDecomposition basis = box_basis();

    for (std::size_t k = 0; k < 3; ++k)
        REQUIRE_THAT(prob_intermediate(s, k, basis), WithinAbs(1.0 / 3.0, 1e-12));

    // eigenstate input: certain outcome
    const Scenario pinned(StateVector::basis(3, 1), identity(3), identity(3),
                          StateVector::basis(3, 1));
    REQUIRE_THAT(prob_intermediate(pinned, 1, basis), WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(prob_intermediate(pinned, 0, basis), WithinAbs(0.0, 1e-12));

    std::mt19937_64 eng(22);
    for (int rep = 0; rep < 25; ++rep) {
        const auto dim = static_cast<Eigen::Index>(2 + eng() % 7);
        const Scenario r = random_scenario(dim, eng);
        const SpectralDecomposition b = spectral_decompose(random_hermitian(dim, eng));
        double total = 0.0;
        for (std::size_t k = 0; k < b.size(); ++k) total += prob_intermediate(r, k, b);
        REQUIRE_THAT(total, WithinAbs(1.0, 1e-10));
    }

    REQUIRE_THROWS_AS(prob_intermediate(s, 3, basis), IndexError);
    REQUIRE_THROWS_AS(prob_intermediate(s, 0, box_basis(4)), DimensionError);
}

TEST_CASE("two-step channel probabilities", "[scenario]") {
    const Scenario s = three_box();
    const SpectralDecomposition basis = box_basis();

    for (std::size_t k = 0; k < 3; ++k)
        REQUIRE_THAT(prob_via_channel(s, k, basis), WithinAbs(1.0 / 9.0, 1e-12));

    // the channel sum keeps no interference, so it need not (and here does
    // not) reproduce the direct transition probability
    double channel_sum = 0.0;
    for (std::size_t k = 0; k < 3; ++k) channel_sum += prob_via_channel(s, k, basis);
    REQUIRE_THAT(channel_sum, WithinAbs(1.0 / 3.0, 1e-12));
    REQUIRE(channel_sum > 2.0 * prob_transition(s));

    // a channel orthogonal to the input contributes nothing
    const Scenario pinned(StateVector::basis(3, 0), identity(3), identity(3),
                          StateVector::basis(3, 0));
    REQUIRE_THAT(prob_via_channel(pinned, 1, basis), WithinAbs(0.0, 1e-14));
    REQUIRE_THAT(prob_via_channel(pinned, 0, basis), WithinAbs(1.0, 1e-12));

    REQUIRE_THROWS_AS(prob_via_channel(s, 9, basis), IndexError);
}

TEST_CASE("strong measurement collapses and reproduces", "[scenario]") {
    const SpectralDecomposition basis = box_basis();
    const Scenario s = three_box();
    const StateVector at_window(s.state_at_window());

    SECTION("eigenstate input is deterministic") {
        RandomSource rng(99);
        const StrongOutcome o = strong_measure(StateVector::basis(3, 2), basis, rng);
        REQUIRE(o.eigenvalue_index == 2);
        REQUIRE_THAT(o.probability, WithinAbs(1.0, 1e-12));
        REQUIRE_THAT(std::abs(inner_product(o.collapsed, StateVector::basis(3, 2))),
                     WithinAbs(1.0, 1e-12));
    }

    SECTION("fixed seed reproduces the outcome sequence") {
        RandomSource r1(7), r2(7);
        for (int i = 0; i < 200; ++i) {
            const StrongOutcome a = strong_measure(at_window, basis, r1);
            const StrongOutcome b = strong_measure(at_window, basis, r2);
            REQUIRE(a.eigenvalue_index == b.eigenvalue_index);
            REQUIRE(a.probability == b.probability);
        }
    }

    SECTION("an immediate repetition confirms the first outcome") {
        RandomSource rng(2024);
        for (int i = 0; i < 1000; ++i) {
            const StrongOutcome first = strong_measure(at_window, basis, rng);
            const StrongOutcome again = strong_measure(first.collapsed, basis, rng);
            REQUIRE(again.eigenvalue_index == first.eigenvalue_index);
            REQUIRE_THAT(again.probability, WithinAbs(1.0, 1e-10));
        }
    }

    SECTION("Born frequencies for the three-box input") {
        RandomSource rng(5);
        const int n = 100000;
        int counts[3] = {0, 0, 0};
        for (int i = 0; i < n; ++i) counts[strong_measure(at_window, basis, rng).eigenvalue_index]++;
        // 99% binomial interval around 1/3
        const double half_width = 2.5758 * std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / n);
        for (int k = 0; k < 3; ++k)
            REQUIRE_THAT(counts[k] / double(n), WithinAbs(1.0 / 3.0, half_width));
    }

    RandomSource rng(1);
    REQUIRE_THROWS_AS(strong_measure(StateVector::basis(4, 0), basis, rng), DimensionError);
}
