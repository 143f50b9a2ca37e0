#include <cmath>

#include <doctest.h>

#include "prepbench/filters.hpp"
#include "support/helpers.hpp"

using namespace prepbench;
using testsupport::random_gray;

TEST_CASE("box filter basics") {
    ImageBuffer constant = make_image(5, 5, 1, 77);
    CHECK(box_filter(constant, 3) == constant);

    auto img = random_gray(6, 6, 1);
    CHECK(box_filter(img, 1) == img);

    ImageBuffer impulse = make_image(3, 3, 1, 0);
    impulse.at(1, 1) = 255;
    CHECK(box_filter(impulse, 3).at(1, 1) == 28); // round(255/9)

    CHECK_THROWS_AS(box_filter(img, 4), Error);
}

TEST_CASE("median filter basics") {
    ImageBuffer img = make_image(5, 5, 1, 60);
    img.at(2, 2) = 255;
    auto out = median_filter(img, 3);
    for (auto p : out.pixels)
        CHECK(p == 60);

    auto noise = random_gray(6, 6, 2);
    CHECK(median_filter(noise, 1) == noise);

    ImageBuffer row = make_image(5, 1, 1);
    row.pixels = {10, 200, 30, 40, 50};
    auto filtered = median_filter(row, 3);
    CHECK(filtered.pixels == std::vector<std::uint8_t>{10, 30, 40, 40, 50});
}

TEST_CASE("box and median stay within input range") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto img = random_gray(8, 8, 20 + seed);
        auto [lo, hi] = std::minmax_element(img.pixels.begin(), img.pixels.end());
        for (const auto& out : {box_filter(img, 3), median_filter(img, 5)}) {
            for (auto p : out.pixels) {
                CHECK(p >= *lo);
                CHECK(p <= *hi);
            }
        }
    }
}

TEST_CASE("wiener filter collapses on flat or noiseless input") {
    ImageBuffer constant = make_image(4, 4, 1, 90);
    CHECK(wiener_filter(constant, 3) == constant);

    auto img = random_gray(6, 6, 3);
    CHECK(wiener_filter(img, 3, 0.0) == img); // gain 1 everywhere

    CHECK_THROWS_AS(wiener_filter(img, 4), Error);
    CHECK_THROWS_AS(wiener_filter(img, 3, -1.0), Error);
}

TEST_CASE("wiener filter hand-computed center value") {
    ImageBuffer img = make_image(3, 3, 1, 0);
    img.at(1, 1) = 90;
    // center: mu = 10, sigma2 = 800, nu2 = 100 -> gain 0.875 -> 10 + 0.875*80 = 80
    auto out = wiener_filter(img, 3, 100.0);
    CHECK(out.at(1, 1) == 80);
}

TEST_CASE("adaptive unsharp leaves flat areas, sharpens edges") {
    ImageBuffer constant = make_image(4, 4, 1, 123);
    CHECK(unsharp_adaptive(constant, 3, 1.5, 0.0, 10.0) == constant);

    auto img = random_gray(5, 5, 8);
    CHECK(unsharp_adaptive(img, 3, 0.0, 0.0, 10.0) == img);

    ImageBuffer edge = make_image(6, 1, 1);
    edge.pixels = {100, 100, 100, 150, 150, 150};
    auto out = unsharp_adaptive(edge, 3, 1.0, 0.0, 1.0);
    CHECK(out.pixels == std::vector<std::uint8_t>{100, 100, 83, 167, 150, 150});

    CHECK_THROWS_AS(unsharp_adaptive(img, 3, 1.0, 5.0, 5.0), Error);
}

TEST_CASE("dwt_upscale constants and fixture") {
    ImageBuffer constant = make_image(4, 6, 1, 201);
    auto up = dwt_upscale(constant);
    CHECK(up.width == 8);
    CHECK(up.height == 12);
    for (auto p : up.pixels)
        CHECK(p == 201);

    ImageBuffer img = make_image(2, 2, 1);
    img.pixels = {0, 0, 255, 255};
    auto out = dwt_upscale(img);
    std::vector<std::uint8_t> expected = {0, 0, 0, 0, 32, 32, 32, 32,
                                          223, 223, 223, 223, 255, 255, 255, 255};
    CHECK(out.pixels == expected);

    CHECK_THROWS_AS(dwt_upscale(make_image(3, 4, 1)), Error);
}

TEST_CASE("haar analysis/synthesis pair is exact") {
    auto img = random_gray(8, 8, 11);
    // forward then inverse of the orthonormal 2x2 Haar step reproduces the
    // block exactly in real arithmetic
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) {
            double a = img.at(2 * i, 2 * j), b = img.at(2 * i + 1, 2 * j);
            double c = img.at(2 * i, 2 * j + 1), d = img.at(2 * i + 1, 2 * j + 1);
            double ll = (a + b + c + d) / 2, hl = (a - b + c - d) / 2;
            double lh = (a + b - c - d) / 2, hh = (a - b - c + d) / 2;
            CHECK((ll + hl + lh + hh) / 2 == doctest::Approx(a).epsilon(1e-12));
            CHECK((ll - hl + lh - hh) / 2 == doctest::Approx(b).epsilon(1e-12));
            CHECK((ll + hl - lh - hh) / 2 == doctest::Approx(c).epsilon(1e-12));
            CHECK((ll - hl - lh + hh) / 2 == doctest::Approx(d).epsilon(1e-12));
        }
}

TEST_CASE("gaussian noise is deterministic and unbiased") {
    auto img = random_gray(32, 32, 4);
    CHECK(add_gaussian(img, 0.0, 7) == img);
    CHECK(add_gaussian(img, 12.0, 7) == add_gaussian(img, 12.0, 7));
    CHECK(add_gaussian(img, 12.0, 7) != add_gaussian(img, 12.0, 8));
}

TEST_CASE("gaussian noise empirical std-dev within 2 percent") {
    ImageBuffer mid = make_image(1000, 1000, 1, 128);
    auto noisy = add_gaussian(mid, 10.0, 1);
    double sum = 0, sum2 = 0;
    for (std::size_t i = 0; i < noisy.pixels.size(); ++i) {
        double d = static_cast<double>(noisy.pixels[i]) - 128.0;
        sum += d;
        sum2 += d * d;
    }
    double n = static_cast<double>(noisy.pixels.size());
    double stddev = std::sqrt(sum2 / n - (sum / n) * (sum / n));
    CHECK(stddev == doctest::Approx(10.0).epsilon(0.02));
}

TEST_CASE("impulse noise endpoints and rate") {
    auto img = random_gray(16, 16, 5);
    CHECK(add_impulse(img, 0.0, 3) == img);

    auto all = add_impulse(make_image(32, 32, 1, 128), 1.0, 3);
    for (auto p : all.pixels)
        CHECK((p == 0 || p == 255));

    ImageBuffer mid = make_image(1000, 1000, 1, 128);
    auto noisy = add_impulse(mid, 0.05, 9);
    std::size_t corrupted = 0;
    for (auto p : noisy.pixels)
        corrupted += p != 128;
    double rate = static_cast<double>(corrupted) / static_cast<double>(noisy.pixels.size());
    CHECK(std::abs(rate - 0.05) < 0.01);

    CHECK(add_impulse(mid, 0.05, 9) == noisy);
}
