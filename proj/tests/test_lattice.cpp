#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "diophlab/lattice.hpp"
#include "diophlab/rng.hpp"

using namespace diophlab;

namespace {

double unit_ball_volume(std::size_t n) {
    if (n == 1) return 2.0;
    if (n == 2) return M_PI;
    if (n == 3) return 4.0 * M_PI / 3.0;
    if (n == 4) return M_PI * M_PI / 2.0;
    throw std::logic_error("unsupported dim");
}

MatQ random_integer_basis(CounterRng& rng, std::size_t n) {
    while (true) {
        MatQ B(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) B(i, j) = Rat(rng.next_int(-4, 4));
        if (B.det() != 0) return B;
    }
}

MatQ random_rational_basis(CounterRng& rng, std::size_t n) {
    while (true) {
        MatQ B(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                B(i, j) = Rat(rng.next_int(-6, 6), rng.next_int(1, 4));
        if (B.det() != 0) return B;
    }
}

double lattice_norm(const MatQ& B, const std::vector<long long>& c) {
    double s = 0;
    for (std::size_t i = 0; i < B.dim(); ++i) {
        Rat acc(0);
        for (std::size_t j = 0; j < B.dim(); ++j) acc += B(i, j) * Rat(c[j]);
        s += to_double(acc) * to_double(acc);
    }
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("minima of simple lattices") {
    auto I3 = MatQ::identity(3);
    auto rep = successive_minima(I3, 3);
    CHECK(rep.lambdas == std::vector<double>{1.0, 1.0, 1.0});

    MatQ D(2);
    D(0, 0) = Rat(3);
    D(1, 1) = Rat(1, 3);
    auto rep2 = successive_minima(D, 2);
    CHECK(rep2.lambdas[0] == Catch::Approx(1.0 / 3));
    CHECK(rep2.lambdas[1] == Catch::Approx(3.0));

    // generators (1,0) and (0.5,0.1) as columns
    MatQ S(2);
    S(0, 0) = Rat(1);
    S(0, 1) = Rat(1, 2);
    S(1, 1) = Rat(1, 10);
    auto rep3 = successive_minima(S, 2);
    CHECK(rep3.lambdas[0] == Catch::Approx(0.2));
    CHECK(rep3.lambdas[1] == Catch::Approx(std::sqrt(0.26)));
    // the first minimum is attained by 2*c2 - c1
    CHECK(rep3.vectors[0][0] * rep3.vectors[0][1] == -2);
}

TEST_CASE("every reported minimum is realized by its preimage") {
    CounterRng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 2 + static_cast<std::size_t>(rng.next_int(0, 2));
        MatQ B = random_rational_basis(rng, n);
        auto rep = successive_minima(B, n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(lattice_norm(B, rep.vectors[i]) ==
                  Catch::Approx(rep.lambdas[i]).epsilon(1e-12));
        for (std::size_t i = 0; i + 1 < n; ++i) CHECK(rep.lambdas[i] <= rep.lambdas[i + 1]);
    }
}

TEST_CASE("short vectors on reference lattices") {
    SECTION("identity counts both signs") {
        for (std::size_t n : {2ul, 3ul}) {
            auto vs = short_vectors(MatQ::identity(n), 1.5);
            std::size_t expect = 2 * n + 4 * (n * (n - 1) / 2);
            CHECK(vs.size() == expect);
        }
    }
    SECTION("scaled lattice below radius is empty") {
        MatQ D(2);
        D(0, 0) = Rat(2);
        D(1, 1) = Rat(2);
        CHECK(short_vectors(D, 1.0).empty());
    }
    SECTION("skew lattice matches the brute-force oracle") {
        MatQ S(2);
        S(0, 0) = Rat(1);
        S(0, 1) = Rat(1, 2);
        S(1, 1) = Rat(1, 10);
        double radius = 0.55;
        std::set<std::pair<long long, long long>> oracle;
        for (long long c1 = -20; c1 <= 20; ++c1)
            for (long long c2 = -20; c2 <= 20; ++c2) {
                if (c1 == 0 && c2 == 0) continue;
                double vx = c1 + 0.5 * c2, vy = 0.1 * c2;
                if (vx * vx + vy * vy <= radius * radius) oracle.insert({c1, c2});
            }
        auto vs = short_vectors(S, radius);
        CHECK(vs.size() == oracle.size());
        for (const auto& v : vs) CHECK(oracle.count({v.c[0], v.c[1]}) == 1);
        // the spot values from the oracle
        CHECK(oracle.count({-1, 2}) == 1);   // (0, 0.2)
        CHECK(oracle.count({-2, 4}) == 1);   // (0, 0.4)
        CHECK(oracle.count({0, 1}) == 1);    // (0.5, 0.1)
        CHECK(oracle.count({1, -1}) == 1);   // (0.5, -0.1)
        CHECK(oracle.count({2, -3}) == 0);   // (0.5,-0.3) has norm 0.583 > 0.55
    }
}

TEST_CASE("minkowski second theorem band") {
    CounterRng rng(7);
    for (std::size_t n : {2ul, 3ul, 4ul}) {
        double V = unit_ball_volume(n);
        double lo = std::pow(2.0, static_cast<double>(n)) / (std::tgamma(n + 1) * V);
        double hi = std::pow(2.0, static_cast<double>(n)) / V;
        for (int trial = 0; trial < 20; ++trial) {
            MatQ B = random_integer_basis(rng, n);
            auto rep = successive_minima(B, n);
            double prod = 1;
            for (double l : rep.lambdas) prod *= l;
            double ratio = prod / std::fabs(to_double(B.det()));
            CHECK(ratio >= lo * (1 - 1e-9));
            CHECK(ratio <= hi * (1 + 1e-9));
        }
    }
}

TEST_CASE("dual matrix identities") {
    MatQ D(3);
    D(0, 0) = Rat(2);
    D(1, 1) = Rat(3);
    D(2, 2) = Rat(5);
    auto Ds = dual_matrix(D);
    CHECK(Ds(0, 0) == Rat(1, 5));
    CHECK(Ds(1, 1) == Rat(1, 3));
    CHECK(Ds(2, 2) == Rat(1, 2));

    CounterRng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        MatQ A = random_rational_basis(rng, 3);
        MatQ B = random_rational_basis(rng, 3);
        CHECK(dual_matrix(dual_matrix(A)) == A);
        CHECK(dual_matrix(A * B) == dual_matrix(A) * dual_matrix(B));
    }
    MatQ Z(2);
    CHECK_THROWS_AS(dual_matrix(Z), std::domain_error);
}

TEST_CASE("duality band is stable") {
    CounterRng rng(29);
    for (std::size_t n : {2ul, 3ul}) {
        double lo = 1e300, hi = 0;
        for (int trial = 0; trial < 30; ++trial) {
            MatQ g = random_rational_basis(rng, n);
            auto l1 = successive_minima(g, 1);
            auto ln = successive_minima(dual_matrix(g), n);
            double prod = l1.lambdas[0] * ln.lambdas[n - 1];
            lo = std::min(lo, prod);
            hi = std::max(hi, prod);
        }
        CHECK(hi / lo < 100.0);
        CHECK(lo >= 1.0 - 1e-9);  // transference lower bound
    }
}

TEST_CASE("budget errors carry a proven lower bound") {
    MatQ big(3);
    big(0, 0) = Rat(1, 1000);
    big(1, 1) = Rat(1, 1000);
    big(2, 2) = Rat(1000000);
    try {
        successive_minima(big, 3, /*budget=*/2000);
        FAIL("expected BudgetExceeded");
    } catch (const BudgetExceeded& e) {
        CHECK(e.lambda1_lower_bound >= 0.0);
    }
}

TEST_CASE("dimension above six returns a flagged sandwich") {
    auto rep = successive_minima(MatQ::identity(7), 3);
    CHECK(rep.approximate);
    REQUIRE(rep.lambdas.size() == 3);
    REQUIRE(rep.lambdas_lower.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(rep.lambdas_lower[i] <= 1.0 + 1e-9);
        CHECK(rep.lambdas[i] >= 1.0 - 1e-9);
    }
}
