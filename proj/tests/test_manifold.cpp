#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "diophlab/manifold.hpp"

using namespace diophlab;

TEST_CASE("chart evaluation") {
    Chart par = make_chart("parabola");
    std::vector<Rat> x{Rat(1, 3)};
    auto y = eval_chart(par, x);
    CHECK(y[0] == Rat(1, 3));
    CHECK(y[1] == Rat(1, 9));

    Chart ver = make_chart("veronese3");
    std::vector<Rat> x2{Rat(2)};
    auto y2 = eval_chart(ver, x2, false);
    CHECK(y2 == std::vector<Rat>{Rat(2), Rat(4), Rat(8)});

    Chart cyl = make_chart("cylinder");
    auto y3 = eval_chart(cyl, std::vector<double>{0.6, 5.0});
    CHECK(y3[0] == Catch::Approx(0.6));
    CHECK(y3[1] == Catch::Approx(0.8));
    CHECK(y3[2] == Catch::Approx(5.0));

    CHECK_THROWS_AS(eval_chart(par, std::vector<double>{2.0}), std::domain_error);
}

TEST_CASE("jacobian closed forms") {
    Chart par = make_chart("parabola");
    auto J = chart_jacobian(par, std::vector<double>{0.5});
    CHECK(J[0][0] == 1.0);
    CHECK(J[0][1] == Catch::Approx(1.0));  // derivative of x^2 at 1/2

    Chart ver = make_chart("veronese3");
    auto J2 = chart_jacobian(ver, std::vector<double>{1.0});
    CHECK(J2[0] == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("jacobian matches central differences") {
    const double h = 1e-6;
    for (const char* name : {"parabola", "veronese3", "veronese4", "circle", "sphere"}) {
        Chart c = make_chart(name);
        for (int s = 0; s < 100; ++s) {
            std::vector<double> x(c.d());
            for (std::size_t i = 0; i < c.d(); ++i) {
                double u = uniform01(99, i, static_cast<std::uint64_t>(s));
                double lo = c.domain().lo[i] + 0.05, hi = c.domain().hi[i] - 0.05;
                x[i] = lo + u * (hi - lo);
            }
            auto J = chart_jacobian(c, x);
            for (std::size_t v = 0; v < c.d(); ++v) {
                auto xp = x, xm = x;
                xp[v] += h;
                xm[v] -= h;
                auto yp = eval_chart(c, xp, false), ym = eval_chart(c, xm, false);
                for (std::size_t k = 0; k < c.n(); ++k) {
                    double fd = (yp[k] - ym[k]) / (2 * h);
                    double scale = std::max(1.0, std::fabs(J[v][k]));
                    CHECK(std::fabs(fd - J[v][k]) <= 1e-6 * scale);
                }
            }
        }
    }
}

TEST_CASE("second-derivative bounds") {
    Chart par = make_chart("parabola");
    CHECK(second_order_bound(par, par.domain()) == Catch::Approx(2.0));

    Chart ver = make_chart("veronese3");
    CHECK(second_order_bound(ver, ver.domain()) == Catch::Approx(6.0));

    DomainBox half{{0.0}, {0.5}};
    CHECK(second_order_bound(ver, half) == Catch::Approx(3.0));

    Chart circ = make_chart("circle");
    DomainBox mid{{-0.5}, {0.5}};
    double M = second_order_bound(circ, mid);
    // |f''| = (1-x^2)^{-3/2} peaks at the box edge
    CHECK(M >= std::pow(1 - 0.25, -1.5));
}

TEST_CASE("sampled rank check") {
    auto rep = sample_rank_check(make_chart("parabola"), 100, 3);
    CHECK(rep.pass());
    CHECK_FALSE(rep.affine_relation);

    auto rep2 = sample_rank_check(make_chart("degenerate_line"), 50, 3);
    CHECK(rep2.pass());  // rank is still d
    CHECK(rep2.affine_relation);

    auto rep3 = sample_rank_check(make_chart("cylinder"), 100, 3);
    CHECK(rep3.pass());
}

TEST_CASE("block structure validation") {
    // a second-block map may not depend on later variables
    Poly bad(2);
    bad.add_term(Rat(1), {0, 1});
    CHECK_THROWS_AS(Chart("bad", {{1, 1}, {1, 0}}, {{bad}, {}}, DomainBox{{0, 0}, {1, 1}}, 2),
                    ConfigError);
    // interleaving: every independent block nonempty
    CHECK_THROWS_AS(Chart("bad2", {{0, 1}}, {{Poly(0)}}, DomainBox{{}, {}}, 2), ConfigError);
    // only the last dependent block may be empty
    CHECK_THROWS_AS(Chart("bad3", {{1, 0}, {1, 1}},
                          {{}, {Poly::monomial(2, Rat(1), {1, 0})}},
                          DomainBox{{0, 0}, {1, 1}}, 2),
                    ConfigError);
}

TEST_CASE("polynomial chart independence is exact") {
    Chart cyl2("poly_cylinder", {{1, 1}, {1, 0}},
               {{Poly::monomial(2, Rat(1), {2, 0})}, {}}, DomainBox{{0, 0}, {1, 1}}, 2);
    const Poly& g1 = std::get<Poly>(cyl2.fn(0, 0));
    for (const auto& t : g1.terms()) CHECK(t.exps[1] == 0);
}

TEST_CASE("chart file parsing") {
    std::string text =
        "blocks 1 1\n"
        "domain 0 1\n"
        "poly\n"
        "1/2 2\n"
        "1/2 1\n";
    Chart c = parse_chart_file(text, "mixed");
    auto y = eval_chart(c, std::vector<Rat>{Rat(1, 2)});
    CHECK(y[1] == Rat(3, 8));  // x^2/2 + x/2 at 1/2
}
