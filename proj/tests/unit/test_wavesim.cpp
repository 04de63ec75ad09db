#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "pat/error.hpp"
#include "pat/spectral.hpp"
#include "pat/wavesim.hpp"
#include "testutil.hpp"

using namespace pat;
using testutil::rel_diff;

namespace {

constexpr double kDx = 1e-4;
constexpr double kC = 1500.0;
constexpr double kPi = std::numbers::pi;

double signed_freq(int m, int n) { return m < (n + 1) / 2 ? m : m - n; }

// IDFT{cos(c|k|t) DFT{p0}} by direct summation.
std::vector<double> naive_one_shot(const std::vector<double>& p0, int rows, int cols, double t) {
    using cd = std::complex<double>;
    std::vector<cd> spec(p0.size());
    for (int a = 0; a < rows; ++a)
        for (int b = 0; b < cols; ++b) {
            cd s = 0.0;
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j)
                    s += p0[i * cols + j] * std::polar(1.0, -2 * kPi * (double(a * i) / rows +
                                                                      double(b * j) / cols));
            const double ky = 2 * kPi * signed_freq(a, rows) / (rows * kDx);
            const double kx = 2 * kPi * signed_freq(b, cols) / (cols * kDx);
            spec[a * cols + b] = s * std::cos(kC * std::hypot(kx, ky) * t);
        }
    std::vector<double> out(p0.size());
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            cd s = 0.0;
            for (int a = 0; a < rows; ++a)
                for (int b = 0; b < cols; ++b)
                    s += spec[a * cols + b] * std::polar(1.0, 2 * kPi * (double(a * i) / rows +
                                                                       double(b * j) / cols));
            out[i * cols + j] = s.real() / (rows * cols);
        }
    return out;
}

// Runs n steps of the recursion from a field at rest.
std::vector<double> run_steps(SpectralPropagator& prop, const std::vector<double>& p0, int n) {
    std::vector<double> prev(p0.size()), curr = p0, next(p0.size());
    prop.apply_cosine(curr, prev);  // p(-dt) = p(dt) = C p0
    for (int s = 0; s < n; ++s) {
        prop.step(prev, curr, next);
        std::swap(prev, curr);
        std::swap(curr, next);
    }
    return curr;
}

SensorArray single_sensor(Node n) { return SensorArray{{n}, Aperture::semicircle}; }

} // namespace

TEST_CASE("uniform field is a fixed point of one step") {
    const Image c(16, 24, 0.7);
    const Image next = propagate_step(c, c, kDx, SimConfig{});
    for (double v : next.values()) CHECK(v == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("grid-exact cosine mode follows the analytic solution") {
    const int rows = 32, cols = 48, a = 3, b = 5, n = 150;
    const double dt = 0.3 * kDx / kC;
    SpectralPropagator prop(rows, cols, kDx, kC, dt);
    const double ky = 2 * kPi * a / (rows * kDx), kx = 2 * kPi * b / (cols * kDx);
    const double w = kC * std::hypot(kx, ky);
    std::vector<double> mode(rows * cols), prev(rows * cols), expect(rows * cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const double ph = ky * i * kDx + kx * j * kDx;
            mode[i * cols + j] = std::cos(ph);
            prev[i * cols + j] = std::cos(ph) * std::cos(w * dt);
            expect[i * cols + j] = std::cos(ph) * std::cos(w * n * dt);
        }
    std::vector<double> curr = mode, next(mode.size());
    for (int s = 0; s < n; ++s) {
        prop.step(prev, curr, next);
        std::swap(prev, curr);
        std::swap(curr, next);
    }
    CHECK(rel_diff(curr, expect) < 1e-10);
}

TEST_CASE("recursion matches a direct DFT evaluation on a non-square grid") {
    const int rows = 12, cols = 10, n = 37;
    const double dt = 0.3 * kDx / kC;
    SpectralPropagator prop(rows, cols, kDx, kC, dt);
    const Image p0 = testutil::random_image(rows, cols, 5);
    const auto stepped = run_steps(prop, p0.data(), n);
    const auto oracle = naive_one_shot(p0.data(), rows, cols, n * dt);
    CHECK(rel_diff(stepped, oracle) < 1e-10);

    std::vector<double> one_shot(p0.size());
    prop.evolve(p0.values(), one_shot, n * dt);
    CHECK(rel_diff(one_shot, oracle) < 1e-12);
}

TEST_CASE("recursion equals the one-shot evaluation for random fields") {
    const int rows = 128, cols = 128, n = 200;
    const double dt = 0.3 * kDx / kC;
    SpectralPropagator prop(rows, cols, kDx, kC, dt);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const Image p0 = testutil::random_image(rows, cols, seed);
        std::vector<double> one_shot(p0.size());
        prop.evolve(p0.values(), one_shot, n * dt);
        CHECK(rel_diff(run_steps(prop, p0.data(), n), one_shot) < 1e-10);
    }
}

TEST_CASE("stepping forward then backward returns the initial field") {
    const int rows = 64, cols = 40, n = 300;
    const double dt = 0.5 * kDx / kC;
    SpectralPropagator prop(rows, cols, kDx, kC, dt);
    const Image p0 = testutil::random_image(rows, cols, 17);
    std::vector<double> prev(p0.size()), curr = p0.data(), next(p0.size());
    prop.apply_cosine(curr, prev);
    for (int s = 0; s < n; ++s) {
        prop.step(prev, curr, next);
        std::swap(prev, curr);
        std::swap(curr, next);
    }
    // (prev, curr) = (p_{n-1}, p_n); walk back with the roles swapped.
    std::swap(prev, curr);
    for (int s = 0; s < n - 1; ++s) {
        prop.step(prev, curr, next);
        std::swap(prev, curr);
        std::swap(curr, next);
    }
    CHECK(rel_diff(curr, p0.data()) < 1e-8);
}

TEST_CASE("field energy stays bounded for cfl up to one") {
    for (double cfl : {0.3, 0.7, 1.0}) {
        const double dt = cfl * kDx / kC;
        SpectralPropagator prop(48, 48, kDx, kC, dt);
        const Image p0 = testutil::random_image(48, 48, 3);
        const double e0 = norm2(p0.values());
        std::vector<double> prev(p0.size()), curr = p0.data(), next(p0.size());
        prop.apply_cosine(curr, prev);
        double worst = 0.0;
        for (int s = 0; s < 500; ++s) {
            prop.step(prev, curr, next);
            std::swap(prev, curr);
            std::swap(curr, next);
            worst = std::max(worst, norm2(curr));
        }
        CHECK(worst <= e0 * (1 + 1e-9));
    }
}

TEST_CASE("padded size search returns fast FFT sizes") {
    CHECK(next_fft_size(1) == 1);
    CHECK(next_fft_size(7) == 8);
    CHECK(next_fft_size(11) == 12);
    CHECK(next_fft_size(301) == 320);
    CHECK(next_fft_size(321) == 384);
    CHECK(next_fft_size(641) == 768);
}

TEST_CASE("forward of zero is zero and forward is linear") {
    const Grid g(64, 64);
    const auto s = make_sensor_array(g, 16, 60, Aperture::semicircle);
    WaveSimulator sim(g, s, SimConfig{});
    const auto y0 = sim.forward(Image(64, 64));
    for (double v : y0.values) CHECK(v == 0.0);

    const Image x1 = testutil::random_image(64, 64, 1), x2 = testutil::random_image(64, 64, 2);
    const double a = 1.7, b = -0.4;
    Image mix(64, 64);
    for (std::size_t k = 0; k < mix.size(); ++k) mix.data()[k] = a * x1.data()[k] + b * x2.data()[k];
    const auto y1 = sim.forward(x1), y2 = sim.forward(x2), ym = sim.forward(mix);
    std::vector<double> combo(y1.values.size());
    for (std::size_t k = 0; k < combo.size(); ++k) combo[k] = a * y1.values[k] + b * y2.values[k];
    CHECK(rel_diff(ym.values, combo) < 1e-10);
}

TEST_CASE("point source arrives at distance over sound speed") {
    const Grid g(128, 128);
    SimConfig cfg;
    WaveSimulator sim(g, single_sensor({64, 4}), cfg);
    Image x(128, 128);
    x(64, 64) = 1.0;
    const auto y = sim.forward(x);
    std::size_t best = 0;
    for (std::size_t n = 1; n < y.n_steps; ++n)
        if (std::abs(y.at(0, n)) > std::abs(y.at(0, best))) best = n;
    const double expected = time_of_flight(g, {64, 64}, {64, 4}, cfg.medium);
    CHECK(expected == doctest::Approx(4.0e-6));
    CHECK(std::abs(best * sim.dt() - expected) <= 2 * sim.dt());
}

TEST_CASE("configurations that would wrap around are rejected") {
    const Grid g(128, 128);
    const auto s = make_sensor_array(g, 32, 120, Aperture::semicircle);
    SimConfig cfg;
    cfg.pad_factor = 2;
    CHECK_THROWS_AS(WaveSimulator(g, s, cfg), WrapContamination);
    cfg.pad_factor = 0;
    WaveSimulator sim(g, s, cfg);
    CHECK(sim.padded_rows() == 320);
    const double travel = (sim.n_steps() - 1) * cfg.cfl;
    CHECK(travel <= sim.padded_rows() - 127.0);
}

TEST_CASE("shape errors") {
    const Grid g(32, 32);
    const auto s = make_sensor_array(g, 8, 30, Aperture::semicircle);
    WaveSimulator sim(g, s, SimConfig{});
    CHECK_THROWS_AS(sim.forward(Image(32, 31)), DimensionMismatch);
    CHECK_THROWS_AS(sim.adjoint(SensorData(7, sim.n_steps(), sim.dt())), DimensionMismatch);
    CHECK_THROWS_AS(sim.time_reversal(SensorData(8, sim.n_steps() + 1, sim.dt())),
                    DimensionMismatch);
    CHECK_THROWS_AS(propagate_step(Image(8, 8), Image(8, 9), kDx, SimConfig{}), DimensionMismatch);
    SimConfig bad;
    bad.cfl = 1.5;
    CHECK_THROWS_AS(WaveSimulator(g, s, bad), InvalidArgument);
}

TEST_CASE("adjoint of zero is zero and passes the dot-product test") {
    const Grid g(64, 64);
    const auto s = make_sensor_array(g, 32, 60, Aperture::semicircle);
    WaveSimulator sim(g, s, SimConfig{});
    const auto z = sim.adjoint(SensorData(32, sim.n_steps(), sim.dt()));
    for (double v : z.values()) CHECK(v == 0.0);
    for (std::uint64_t t = 0; t < 4; ++t) {
        const Image x = testutil::random_image(64, 64, 100 + t);
        const SensorData y = testutil::random_data(32, sim.n_steps(), sim.dt(), 200 + t);
        const double lhs = testutil::kahan_dot(sim.forward(x).values, y.values);
        const double rhs = testutil::kahan_dot(x.values(), sim.adjoint(y).values());
        CHECK(std::abs(lhs - rhs) / std::abs(lhs) < 1e-6);
    }
}

TEST_CASE("adjoint of a single impulse concentrates on the matching circle") {
    const Grid g(128, 128);
    const Node sensor{64, 4};
    WaveSimulator sim(g, single_sensor(sensor), SimConfig{});
    const std::size_t n = 200;
    SensorData y(1, sim.n_steps(), sim.dt());
    y.at(0, n) = 1.0;
    const Image z = sim.adjoint(y);
    const double radius = 1500.0 * n * sim.dt() / g.dx();
    double total = 0.0, ridge = 0.0, best = -1.0, best_r = 0.0;
    for (std::size_t i = 0; i < 128; ++i)
        for (std::size_t j = 0; j < 128; ++j) {
            const double r = std::hypot(double(i) - sensor.i, double(j) - sensor.j);
            const double e = z(i, j) * z(i, j);
            total += e;
            if (std::abs(r - radius) <= 2.0) ridge += e;
            if (std::abs(z(i, j)) > best) best = std::abs(z(i, j)), best_r = r;
        }
    CHECK(ridge / total >= 0.8);
    CHECK(std::abs(best_r - radius) <= 2.0);
}

TEST_CASE("time reversal of zero data is zero") {
    const Grid g(32, 32);
    const auto s = make_sensor_array(g, 8, 30, Aperture::full_ring);
    WaveSimulator sim(g, s, SimConfig{});
    const Image z = sim.time_reversal(SensorData(8, sim.n_steps(), sim.dt()));
    for (double v : z.values()) CHECK(v == 0.0);
}

TEST_CASE("full-ring time reversal puts the peak on the source") {
    const Grid g(128, 128);
    const auto s = make_sensor_array(g, 128, 120, Aperture::full_ring);
    WaveSimulator sim(g, s, SimConfig{});
    for (Node src : {Node{50, 70}, Node{80, 45}}) {
        Image x(128, 128);
        x(src.i, src.j) = 1.0;
        const Image r = sim.time_reversal(sim.forward(x));
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < 128; ++i)
            for (std::size_t j = 0; j < 128; ++j)
                if (r(i, j) > r(bi, bj)) bi = i, bj = j;
        CHECK(std::abs(int(bi) - src.i) <= 1);
        CHECK(std::abs(int(bj) - src.j) <= 1);
    }
}

TEST_CASE("free-function wrappers agree with the simulator") {
    const Grid g(32, 32);
    const auto s = make_sensor_array(g, 8, 30, Aperture::semicircle);
    const SimConfig cfg;
    WaveSimulator sim(g, s, cfg);
    const Image x = testutil::random_image(32, 32, 9);
    const auto y = sim.forward(x);
    CHECK(forward(x, g, s, cfg) == y);
    CHECK(adjoint(y, g, s, cfg) == sim.adjoint(y));
    CHECK(time_reversal(y, g, s, cfg) == sim.time_reversal(y));
}
