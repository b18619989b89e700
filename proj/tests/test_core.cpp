// test_core.cpp
// Dates, the Philox generator, numeric helpers and parallel_for.

#include "doctest.h"

#include "vplab/core.hpp"
#include "vplab/numeric.hpp"
#include "vplab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace vplab;

TEST_CASE("date parse and format round trip") {
    const Date d = Date::parse("2020-03-16");
    CHECK(d.iso() == "2020-03-16");
    CHECK(d.year() == 2020);
    CHECK(d.month() == 3u);
    CHECK(d.day() == 16u);
    CHECK(Date::parse("1970-01-01").days == 0);
    CHECK(Date::parse("2000-03-01").days - Date::parse("2000-02-28").days == 2);  // leap year
    CHECK_THROWS_AS(Date::parse("2020-02-30"), DataError);
    CHECK_THROWS_AS(Date::parse("20200316"), DataError);
}

TEST_CASE("business days skip weekends") {
    const auto days = business_days(Date::parse("2024-01-05"), 3);  // a Friday
    REQUIRE(days.size() == 3);
    CHECK(days[0].iso() == "2024-01-05");
    CHECK(days[1].iso() == "2024-01-08");
    CHECK(days[2].iso() == "2024-01-09");
}

TEST_CASE("philox4x32-10 known answers") {
    // Reference vectors published with the Random123 library.
    const auto zero = Philox::philox4x32_10({0, 0, 0, 0}, {0, 0});
    CHECK(zero == Philox::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    const auto ones = Philox::philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                            {0xffffffffu, 0xffffffffu});
    CHECK(ones == Philox::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    const auto pi = Philox::philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                          {0xa4093822u, 0x299f31d0u});
    CHECK(pi == Philox::Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("philox streams are reproducible and distinct") {
    Philox a(42), b(42), c(42, 1);
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        CHECK(x == b());
        CHECK(x != c());
    }
}

TEST_CASE("uniform, normal and below have the right moments") {
    Philox rng(7);
    double s = 0, ss = 0, u_min = 1, u_max = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s += z;
        ss += z * z;
        const double u = rng.uniform();
        u_min = std::min(u_min, u);
        u_max = std::max(u_max, u);
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(std::abs(ss / n - 1.0) < 0.015);
    CHECK(u_min >= 0.0);
    CHECK(u_max < 1.0);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts[rng.below(7)];
    for (int c : counts) CHECK(std::abs(c - 10000) < 400);
}

TEST_CASE("percentile uses linear interpolation between order statistics") {
    const std::vector<double> x{5, 1, 4, 2, 3};
    CHECK(percentile(x, 0.0) == 1.0);
    CHECK(percentile(x, 1.0) == 5.0);
    CHECK(percentile(x, 0.5) == 3.0);
    CHECK(percentile(x, 0.1) == doctest::Approx(1.4));
    CHECK(percentile(x, 0.9) == doctest::Approx(4.6));
}

TEST_CASE("moments") {
    const std::vector<double> x{1, 2, 3, 4, 10};
    CHECK(mean(x) == doctest::Approx(4.0));
    CHECK(sample_variance(x) == doctest::Approx(12.5));
    // m2 = 10, m3 = 36 -> skew = 36 / 10^1.5
    CHECK(skewness(x) == doctest::Approx(36.0 / std::pow(10.0, 1.5)));
    CHECK(std::isnan(sample_variance(std::vector<double>{1.0})));
}

TEST_CASE("fft convolution matches direct convolution") {
    const std::vector<double> a{1, 2, 3, 4};
    const std::vector<double> b{0.5, -1, 2};
    const auto c = fft_convolve(a, b);
    REQUIRE(c.size() == 6);
    for (std::size_t k = 0; k < c.size(); ++k) {
        double direct = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (k >= i && k - i < b.size()) direct += a[i] * b[k - i];
        }
        CHECK(c[k] == doctest::Approx(direct).epsilon(1e-12));
    }
    CHECK(fast_fft_size(1001) == 1008);
}

TEST_CASE("nelder-mead minimises the Rosenbrock function") {
    auto rosen = [](std::span<const double> x) {
        return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
    };
    NelderMeadOptions opt;
    opt.max_evals = 20000;
    opt.f_tol = 1e-14;
    opt.x_tol = 1e-9;
    const auto res = nelder_mead(rosen, {-1.2, 1.0}, opt);
    CHECK(res.converged);
    CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("parallel_for output does not depend on thread count") {
    auto run = [](std::size_t threads) {
        set_thread_count(threads);
        std::vector<double> out(1000);
        parallel_for(out.size(), [&](std::size_t i) {
            Philox rng(3, i);
            out[i] = rng.normal();
        });
        set_thread_count(1);
        return out;
    };
    CHECK(run(1) == run(4));
}
