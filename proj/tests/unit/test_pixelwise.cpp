#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pat/error.hpp"
#include "pat/pixelwise.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace pat;


TEST_CASE("zero data maps to an all-zero tensor") {
    const Grid g(32, 32);
    const auto s = make_sensor_array(g, 8, 30, Aperture::semicircle);
    const auto t = pixel_interpolate(SensorData(8, 100, 2e-8), s, g, Medium{});
    CHECK(t.n_sensors == 8);
    CHECK(t.height == 32);
    CHECK(t.width == 32);
    CHECK(std::all_of(t.values.begin(), t.values.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("a single impulse maps onto an annulus") {
    const Grid g(128, 128);
    const SensorArray s{{{64, 4}}, Aperture::semicircle};
    const Medium m;
    const double dt = 0.3 * g.dx() / m.sound_speed;
    const std::size_t n = 150;
    SensorData y(1, 400, dt);
    y.at(0, n) = 1.0;
    const auto t = pixel_interpolate(y, s, g, m);
    double peak = 0.0;
    for (int i = 0; i < 128; ++i)
        for (int j = 0; j < 128; ++j) {
            const double u = time_of_flight(g, {i, j}, {64, 4}, m) / dt;
            const double expect = std::max(0.0, 1.0 - std::abs(u - double(n)));
            CHECK(std::abs(t.at(0, i, j) - expect) < 1e-12);
            if (t.at(0, i, j) > peak) peak = t.at(0, i, j);
        }
    // Radius 45 px; node (64, 49) sits exactly on it.
    CHECK(t.at(0, 64, 49) == doctest::Approx(1.0));
    CHECK(peak == doctest::Approx(1.0));
}

TEST_CASE("channel sum equals delay-and-sum backprojection") {
    const Grid g(64, 48);
    const auto s = make_sensor_array(g, 16, 44, Aperture::full_ring);
    const Medium m{1540.0, 1000.0};
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto y = testutil::random_data(16, 150, 3e-8, seed);
        const Image sum = pixel_interpolate(y, s, g, m).channel_sum();
        const Image ref = oracles::delay_and_sum(y, s, g, m);
        CHECK(testutil::max_abs_diff(sum.values(), ref.values()) < 1e-12);
    }
}

TEST_CASE("pixel interpolation is linear and channel-local") {
    const Grid g(40, 40);
    const auto s = make_sensor_array(g, 12, 36, Aperture::semicircle);
    const Medium m;
    const auto y1 = testutil::random_data(12, 120, 2e-8, 1);
    const auto y2 = testutil::random_data(12, 120, 2e-8, 2);
    const double a = 0.75, b = -2.5;
    SensorData mix(12, 120, 2e-8);
    for (std::size_t k = 0; k < mix.values.size(); ++k)
        mix.values[k] = a * y1.values[k] + b * y2.values[k];
    const auto t1 = pixel_interpolate(y1, s, g, m), t2 = pixel_interpolate(y2, s, g, m);
    const auto tm = pixel_interpolate(mix, s, g, m);
    for (std::size_t k = 0; k < tm.values.size(); ++k)
        CHECK(tm.values[k] == doctest::Approx(a * t1.values[k] + b * t2.values[k]).epsilon(1e-12));

    for (std::size_t zeroed : {0u, 5u, 11u}) {
        SensorData y = y1;
        for (std::size_t n = 0; n < y.n_steps; ++n) y.at(zeroed, n) = 0.0;
        const auto t = pixel_interpolate(y, s, g, m);
        for (std::size_t c = 0; c < 12; ++c) {
            const auto ch = t.channel(c), ref = t1.channel(c);
            if (c == zeroed)
                CHECK(std::all_of(ch.begin(), ch.end(), [](double v) { return v == 0.0; }));
            else
                CHECK(std::equal(ch.begin(), ch.end(), ref.begin()));
        }
    }
}

TEST_CASE("point-source channels peak on the circle through the source") {
    const Grid g(128, 128);
    const auto s = make_sensor_array(g, 16, 120, Aperture::semicircle);
    const SimConfig cfg;
    WaveSimulator sim(g, s, cfg);
    const Node src{50, 72};
    Image x(128, 128);
    x(src.i, src.j) = 1.0;
    const auto t = pixel_interpolate(sim.forward(x), s, g, cfg.medium);
    for (std::size_t c = 0; c < s.size(); ++c) {
        const auto ch = t.channel(c);
        const auto best = std::max_element(ch.begin(), ch.end()) - ch.begin();
        const Node at{int(best / 128), int(best % 128)};
        const double r_true = distance_px(src, s.positions[c]);
        CHECK(std::abs(distance_px(at, s.positions[c]) - r_true) <= 2.0);
    }
}

TEST_CASE("spreading compensation scales by the square root of distance") {
    const Grid g(32, 32);
    const auto s = make_sensor_array(g, 4, 30, Aperture::semicircle);
    const auto y = testutil::random_data(4, 120, 2e-8, 8);
    PixelInterpOptions opts;
    opts.spreading_compensation = true;
    const auto plain = pixel_interpolate(y, s, g, Medium{});
    const auto comp = pixel_interpolate(y, s, g, Medium{}, opts);
    for (std::size_t c = 0; c < 4; ++c)
        for (int i = 0; i < 32; ++i)
            for (int j = 0; j < 32; ++j) {
                const double r = distance_px({i, j}, s.positions[c]);
                CHECK(comp.at(c, i, j) == doctest::Approx(plain.at(c, i, j) * std::sqrt(r)));
            }
}

TEST_CASE("sensor count mismatch is rejected") {
    const Grid g(32, 32);
    const auto s = make_sensor_array(g, 8, 30, Aperture::semicircle);
    CHECK_THROWS_AS(pixel_interpolate(SensorData(7, 50, 2e-8), s, g, Medium{}), DimensionMismatch);
}

TEST_CASE("resize preserves constants and is the identity at the same size") {
    SensorData c(16, 300, 1e-8);
    std::fill(c.values.begin(), c.values.end(), 0.37);
    const Image r = resize_sensor_data(c, 128, 128);
    for (double v : r.values()) CHECK(v == doctest::Approx(0.37).epsilon(1e-14));

    const auto y = testutil::random_data(9, 13, 1e-8, 4);
    const Image same = resize_sensor_data(y, 9, 13);
    CHECK(testutil::max_abs_diff(same.values(), y.values) <= 1e-12);
}

TEST_CASE("4x4 ramp halves to the 2x2 block centres") {
    SensorData y(4, 4, 1e-8);
    for (std::size_t s = 0; s < 4; ++s)
        for (std::size_t n = 0; n < 4; ++n) y.at(s, n) = 4.0 * s + n;
    // Half-pixel alignment samples the input at (0.5, 0.5), (0.5, 2.5), ...
    // where a bilinear ramp equals the mean of the surrounding 2x2 block.
    const Image r = resize_sensor_data(y, 2, 2);
    CHECK(std::abs(r(0, 0) - 2.5) < 1e-12);
    CHECK(std::abs(r(0, 1) - 4.5) < 1e-12);
    CHECK(std::abs(r(1, 0) - 10.5) < 1e-12);
    CHECK(std::abs(r(1, 1) - 12.5) < 1e-12);
}

TEST_CASE("resize output stays within the input range") {
    pat::Xoshiro256 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const auto ns = std::size_t(rng.uniform_int(2, 40)), nt = std::size_t(rng.uniform_int(2, 300));
        const auto y = testutil::random_data(ns, nt, 1e-8, 1000 + trial);
        const auto [lo, hi] = std::minmax_element(y.values.begin(), y.values.end());
        const Image r = resize_sensor_data(y, std::size_t(rng.uniform_int(2, 64)),
                                           std::size_t(rng.uniform_int(2, 64)));
        for (double v : r.values()) {
            CHECK(v >= *lo - 1e-12);
            CHECK(v <= *hi + 1e-12);
        }
    }
}

TEST_CASE("resize rejects bad shapes") {
    CHECK_THROWS_AS(resize_sensor_data(SensorData(4, 4, 1e-8), 1, 4), InvalidArgument);
    SensorData broken(4, 4, 1e-8);
    broken.values.pop_back();
    CHECK_THROWS_AS(resize_sensor_data(broken, 4, 4), DimensionMismatch);
}
