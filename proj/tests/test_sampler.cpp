#include <cmath>
#include <vector>

#include "doctest.h"
#include "perpress/julia_sampler.hpp"

using namespace perpress;

namespace {

RationalMap zsq() { return RationalMap::polynomial({{0, 0}, {0, 0}, {1, 0}}); }
RationalMap basilica() {
    return RationalMap::polynomial({{-1, 0}, {0, 0}, {1, 0}});
}

const JuliaSample& circle10k() {
    static const JuliaSample s = inverse_iteration_sample(zsq(), 10000, 40, 5);
    return s;
}

}  // namespace

TEST_CASE("escape classification") {
    const RationalMap m = zsq();
    const auto a = escape_classify(m, {2, 0}, 50);
    CHECK(a.escaped);
    CHECK(a.step == 1);  // |f(2)| = 4 leaves the radius 2
    const auto b = escape_classify(m, {0.5, 0}, 50);
    CHECK_FALSE(b.escaped);
    const auto c = escape_classify(basilica(), {0, 0}, 50);
    CHECK_FALSE(c.escaped);
    const auto d = escape_classify(m, {3, 0}, 50);
    CHECK(d.escaped);
    CHECK(d.step == 0);  // already outside

    RationalMap rat({{1, 0}, {0, 0}, {1, 0}}, {{0, 0}, {1, 0}});
    CHECK_THROWS_AS((void)escape_classify(rat, {1, 0}, 10),
                    std::invalid_argument);
}

TEST_CASE("the z^2 sample lies on the unit circle") {
    const JuliaSample& s = circle10k();
    REQUIRE(static_cast<int>(s.points.size()) == s.count);
    for (const cplx& w : s.points)
        CHECK(std::abs(std::abs(w) - 1.0) <= 1e-6);
}

TEST_CASE("the z^2 sample covers every 1/64 arc") {
    std::vector<int> bucket(64, 0);
    for (const cplx& w : circle10k().points) {
        const double th = std::atan2(w.imag(), w.real()) + M_PI;
        int b = static_cast<int>(th / (2.0 * M_PI) * 64.0);
        if (b == 64) b = 0;
        ++bucket[static_cast<std::size_t>(b)];
    }
    for (int b = 0; b < 64; ++b) CHECK(bucket[static_cast<std::size_t>(b)] > 0);
}

TEST_CASE("basilica sample stays in the escape bound") {
    const RationalMap m = basilica();
    const JuliaSample s = inverse_iteration_sample(m, 4000, 40, 9);
    const double bound = 1.0 + std::sqrt(2.0) + 1e-9;
    int bounded = 0;
    for (const cplx& w : s.points) {
        CHECK(std::abs(w) <= bound);
        if (!escape_classify(m, w, 32).escaped) ++bounded;
    }
    CHECK(bounded == static_cast<int>(s.points.size()));

    // forward invariance: images remain non-escaping for >= 99%
    int ok = 0;
    for (const cplx& w : s.points)
        if (!escape_classify(m, m.eval(w), 32).escaped) ++ok;
    CHECK(ok >= static_cast<int>(0.99 * static_cast<double>(s.points.size())));
}

TEST_CASE("sampling is deterministic and validates arguments") {
    const RationalMap m = basilica();
    const JuliaSample a = inverse_iteration_sample(m, 500, 24, 123);
    const JuliaSample b = inverse_iteration_sample(m, 500, 24, 123);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].real() == b.points[i].real());
        CHECK(a.points[i].imag() == b.points[i].imag());
    }
    const JuliaSample c = inverse_iteration_sample(m, 500, 24, 124);
    bool any_differ = false;
    for (std::size_t i = 0; i < a.points.size(); ++i)
        if (a.points[i] != c.points[i]) any_differ = true;
    CHECK(any_differ);

    CHECK_THROWS_AS((void)inverse_iteration_sample(m, 0, 24, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)inverse_iteration_sample(m, 10, 1, 1),
                    std::invalid_argument);
}

TEST_CASE("min_potential over samples") {
    const RationalMap m = zsq();
    const JuliaSample& s = circle10k();
    CHECK(min_potential(s, m, Potential::constant(0.0)) == 0.0);
    // |f'| = 2 on the circle
    CHECK(min_potential(s, m, Potential::log_deriv(1.0)) ==
          doctest::Approx(-std::log(2.0)).epsilon(1e-6));
    // min of Re z on the circle
    CHECK(min_potential(s, m, Potential::coord_re()) ==
          doctest::Approx(-1.0).epsilon(1e-3));

    JuliaSample empty;
    CHECK_THROWS_AS((void)min_potential(empty, m, Potential::constant(1.0)),
                    std::invalid_argument);
    JuliaSample with_critical;
    with_critical.points = {cplx{0, 0}};
    with_critical.count = 1;
    CHECK_THROWS_AS(
        (void)min_potential(with_critical, m, Potential::log_deriv(1.0)),
        std::domain_error);
}
