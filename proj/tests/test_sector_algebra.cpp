#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <map>

#include "spinbath/errors.hpp"
#include "spinbath/sector_algebra.hpp"
#include "spinbath/spin_ops.hpp"

using namespace spinbath;

namespace {

// independent oracle: diagonalize total I^2 on the 2^n product space and
// count multiplets per eigenvalue I(I+1)
std::map<int, int> multiplet_counts_by_diagonalization(int n) {
    const int dim = 1 << n;
    Eigen::MatrixXcd sx = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::MatrixXcd sy = sx, sz = sx;
    SpinMatrices half = spin_matrices(1);
    for (int site = 0; site < n; ++site) {
        Eigen::MatrixXcd ox = Eigen::MatrixXcd::Identity(1, 1);
        Eigen::MatrixXcd oy = ox, oz = ox;
        for (int s = 0; s < n; ++s) {
            const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2, 2);
            ox = kron(ox, s == site ? half.x : id);
            oy = kron(oy, s == site ? half.y : id);
            oz = kron(oz, s == site ? half.z : id);
        }
        sx += ox;
        sy += oy;
        sz += oz;
    }
    Eigen::MatrixXcd i2 = sx * sx + sy * sy + sz * sz;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(i2, Eigen::EigenvaluesOnly);
    std::map<int, int> states_per_sector;  // two_spin -> number of eigenvalues
    for (int k = 0; k < dim; ++k) {
        const double ev = es.eigenvalues()(k);
        // I(I+1) = ev  =>  two_spin = round(sqrt(4 ev + 1) - 1)
        const int ti = static_cast<int>(std::lround(std::sqrt(4 * ev + 1) - 1));
        ++states_per_sector[ti];
    }
    std::map<int, int> counts;
    for (auto [ti, n_states] : states_per_sector) {
        REQUIRE(n_states % (ti + 1) == 0);
        counts[ti] = n_states / (ti + 1);
    }
    return counts;
}

std::uint64_t binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
    return r;
}

}  // namespace

TEST_CASE("multiplicities: small cases and dimension count") {
    auto m2 = multiplicities(2);
    REQUIRE(m2.size() == 2);
    CHECK(m2[0].two_spin == 2);
    CHECK(m2[0].irrep_count == 1);
    CHECK(m2[1].two_spin == 0);
    CHECK(m2[1].irrep_count == 1);

    auto m4 = multiplicities(4);
    REQUIRE(m4.size() == 3);
    CHECK(m4[0].irrep_count == 1);   // I = 2
    CHECK(m4[1].irrep_count == 3);   // I = 1
    CHECK(m4[2].irrep_count == 2);   // I = 0
    CHECK(1 * 5 + 3 * 3 + 2 * 1 == 16);

    for (int n = 1; n <= 20; ++n) {
        unsigned long long total = 0;
        for (const auto& s : multiplicities(n)) total += s.irrep_count * s.dimension;
        CHECK(total == (1ull << n));
    }

    CHECK_THROWS_AS(multiplicities(0), std::invalid_argument);
    CHECK_THROWS_AS(multiplicities(65), ResourceLimitError);
    CHECK_NOTHROW(multiplicities(64));
}

TEST_CASE("multiplicities match brute-force diagonalization of total spin") {
    for (int n : {2, 3, 4, 5, 6}) {
        auto counts = multiplet_counts_by_diagonalization(n);
        auto mults = multiplicities(n);
        REQUIRE(counts.size() == mults.size());
        for (const auto& s : mults) {
            REQUIRE(counts.count(s.two_spin) == 1);
            CHECK(counts[s.two_spin] == static_cast<int>(s.irrep_count));
        }
    }
}

TEST_CASE("maximally mixed weights: frozen values and normalization") {
    auto t2 = maximally_mixed_weights(2);
    CHECK(t2.weight(2) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(t2.weight(0) == doctest::Approx(0.25).epsilon(1e-15));

    auto t4 = maximally_mixed_weights(4);
    CHECK(t4.weight(4) == doctest::Approx(5.0 / 16.0).epsilon(1e-15));
    CHECK(t4.weight(2) == doctest::Approx(9.0 / 16.0).epsilon(1e-15));
    CHECK(t4.weight(0) == doctest::Approx(2.0 / 16.0).epsilon(1e-15));

    for (int n : {1, 2, 5, 10, 20, 50, 100}) {
        SectorWeightTable table = maximally_mixed_weights(n);
        double sum = 0;
        for (const auto& e : table.entries()) sum += e.weight;
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }

    // entries equal d_I (2I+1)/2^n computed independently, exactly
    for (int n = 1; n <= 20; ++n) {
        SectorWeightTable table = maximally_mixed_weights(n);
        for (const auto& s : multiplicities(n)) {
            const double expect =
                std::ldexp(static_cast<double>(s.irrep_count) * s.dimension, -n);
            CHECK(table.weight(s.two_spin) == expect);
        }
    }
}

TEST_CASE("closed-form weight expression equals d_I (2I+1)/2^n, exact integers") {
    // d_I (2I+1) (n/2 + I + 1) == C(n, n/2 - I) (2I+1)^2 for every sector
    for (int n = 1; n <= 20; ++n) {
        for (const auto& s : multiplicities(n)) {
            const std::uint64_t lhs = s.irrep_count *
                                      static_cast<std::uint64_t>(s.dimension) *
                                      static_cast<std::uint64_t>((n + s.two_spin) / 2 + 1);
            const std::uint64_t rhs = binom(n, (n - s.two_spin) / 2) *
                                      static_cast<std::uint64_t>(s.dimension) *
                                      static_cast<std::uint64_t>(s.dimension);
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("gaussian weights") {
    SUBCASE("unnormalized ratio is preserved") {
        auto t = gaussian_weights(100, 0.1, 0.0);
        CHECK(t.weight(0) / t.weight(2) == doctest::Approx(std::exp(0.1)).epsilon(1e-12));
    }
    SUBCASE("huge alpha concentrates on the smallest sector") {
        auto t = gaussian_weights(100, 1e8, 0.0);
        CHECK(t.weight(0) == doctest::Approx(1.0).epsilon(1e-15));
        auto todd = gaussian_weights(7, 1e8, 0.0);
        CHECK(todd.weight(1) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("truncation at 1e-12 keeps sectors up to I = 16 for alpha = 0.1") {
        auto t = gaussian_weights(100, 0.1, 1e-12);
        double sum = 0;
        int max_ti = 0;
        for (const auto& e : t.entries()) {
            sum += e.weight;
            max_ti = std::max(max_ti, e.two_spin);
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        CHECK(max_ti == 32);
        CHECK(t.entries().size() == 17);
    }
    SUBCASE("truncating everything is an error") {
        CHECK_THROWS_AS(gaussian_weights(10, 1e-9, 0.9), EmptyTableError);
    }
    SUBCASE("argument validation") {
        CHECK_THROWS_AS(gaussian_weights(0, 0.1, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(gaussian_weights(10, -1.0, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(gaussian_weights(10, 0.1, 1.5), std::invalid_argument);
    }
}

TEST_CASE("weight table invariants are enforced") {
    CHECK_THROWS_AS(SectorWeightTable(4, {{3, 1.0}}), std::invalid_argument);  // parity
    CHECK_THROWS_AS(SectorWeightTable(4, {{6, 1.0}}), std::invalid_argument);  // > n/2
    CHECK_THROWS_AS(SectorWeightTable(4, {{0, 0.5}, {2, 0.5}}),
                    std::invalid_argument);  // not decreasing
    CHECK_THROWS_AS(SectorWeightTable(4, {{4, 0.5}, {2, 0.4}}),
                    std::invalid_argument);  // sum != 1
    CHECK_THROWS_AS(SectorWeightTable(4, {{4, 1.5}, {2, -0.5}}),
                    std::invalid_argument);  // negative
    CHECK_NOTHROW(SectorWeightTable(4, {{4, 0.5}, {0, 0.5}}));
}
