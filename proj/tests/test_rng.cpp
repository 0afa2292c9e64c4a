#include <doctest.h>

#include <cmath>

#include "eitmc/rng.hpp"

using namespace eitmc;

TEST_CASE("philox known-answer vectors") {
    // Random123 reference values for philox4x32-10
    const auto zero = Philox4x32::block({0u, 0u}, {0u, 0u, 0u, 0u});
    CHECK(zero[0] == 0x6627e8d5u);
    CHECK(zero[1] == 0xe169c58du);
    CHECK(zero[2] == 0xbc57ac4cu);
    CHECK(zero[3] == 0x9b00dbd8u);

    const auto ones = Philox4x32::block(
        {0xffffffffu, 0xffffffffu},
        {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu});
    CHECK(ones[0] == 0x408f276du);
    CHECK(ones[1] == 0x41c83b0eu);
    CHECK(ones[2] == 0xa20bc7c6u);
    CHECK(ones[3] == 0x6d5451fdu);

    const auto pi = Philox4x32::block(
        {0xa4093822u, 0x299f31d0u},
        {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u});
    CHECK(pi[0] == 0xd16cfe09u);
    CHECK(pi[1] == 0x94fdccebu);
    CHECK(pi[2] == 0x5001e420u);
    CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("streams are reproducible and independent of call history") {
    RandomStream a(42, 7);
    RandomStream b(42, 7);
    for (int i = 0; i < 100; ++i) {
        const auto ga = a.gaussian_pair();
        const auto gb = b.gaussian_pair();
        CHECK(ga.first == gb.first);
        CHECK(ga.second == gb.second);
    }

    RandomStream c(42, 8);
    bool any_diff = false;
    RandomStream a2(42, 7);
    for (int i = 0; i < 16; ++i)
        any_diff = any_diff || a2.gaussian_pair() != c.gaussian_pair();
    CHECK(any_diff);

    RandomStream p0(42, 7, StreamPurpose::increments);
    RandomStream p1(42, 7, StreamPurpose::start_sampling);
    CHECK(p0.uniform() != p1.uniform());
}

TEST_CASE("uniform and gaussian moments") {
    RandomStream rng(5, 0);
    const std::size_t n = 500000;
    double su = 0.0, su2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        su += u;
        su2 += u * u;
    }
    const double nu = static_cast<double>(n);
    CHECK(std::abs(su / nu - 0.5) < 4.0 / std::sqrt(12.0 * nu));
    CHECK(std::abs(su2 / nu - 1.0 / 3.0) < 0.002);

    RandomStream g(6, 0);
    double sg = 0.0, sg2 = 0.0, sg4 = 0.0;
    for (std::size_t i = 0; i < n / 2; ++i) {
        const auto [x, y] = g.gaussian_pair();
        sg += x + y;
        sg2 += x * x + y * y;
        sg4 += x * x * x * x + y * y * y * y;
    }
    CHECK(std::abs(sg / nu) < 4.0 / std::sqrt(nu));
    CHECK(std::abs(sg2 / nu - 1.0) < 4.0 * std::sqrt(2.0 / nu));
    CHECK(std::abs(sg4 / nu - 3.0) < 0.1);  // fourth moment of N(0,1)
}
