#include <doctest.h>

#include <cmath>
#include <limits>

#include "pat/error.hpp"
#include "pat/metrics.hpp"
#include "testutil.hpp"

using namespace pat;

namespace {

// SSIM evaluated window by window with a full 2D Gaussian and population
// moments, without any separable filtering.
double reference_ssim(const Image& a, const Image& b, double L = 1.0) {
    constexpr int n = 11;
    constexpr double sigma = 1.5;
    double w[n][n], wsum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double di = i - 5, dj = j - 5;
            w[i][j] = std::exp(-(di * di + dj * dj) / (2 * sigma * sigma));
            wsum += w[i][j];
        }
    const double c1 = std::pow(0.01 * L, 2), c2 = std::pow(0.03 * L, 2);
    double total = 0.0;
    int count = 0;
    for (std::size_t r = 0; r + n <= a.rows(); ++r)
        for (std::size_t c = 0; c + n <= a.cols(); ++c) {
            double ma = 0, mb = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    ma += w[i][j] / wsum * a(r + i, c + j);
                    mb += w[i][j] / wsum * b(r + i, c + j);
                }
            double va = 0, vb = 0, cov = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double da = a(r + i, c + j) - ma, db = b(r + i, c + j) - mb;
                    va += w[i][j] / wsum * da * da;
                    vb += w[i][j] / wsum * db * db;
                    cov += w[i][j] / wsum * da * db;
                }
            total += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    return total / count;
}

} // namespace

TEST_CASE("psnr examples") {
    const Image gt(10, 10, 0.5);
    Image r = gt;
    for (double& v : r.data()) v += 0.1;  // MSE = 0.01
    CHECK(psnr(r, gt) == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(psnr(gt, gt) == std::numeric_limits<double>::infinity());
    CHECK(psnr(Image(4, 4, 1.0), Image(4, 4, 0.0)) == doctest::Approx(0.0).scale(1));
    CHECK(psnr(r, gt, 2.0) == doctest::Approx(20.0 + 20.0 * std::log10(2.0)));
    CHECK_THROWS_AS(psnr(Image(4, 4), Image(4, 5)), DimensionMismatch);
    CHECK_THROWS_AS(psnr(gt, gt, 0.0), InvalidArgument);
}

TEST_CASE("psnr falls as the noise amplitude grows") {
    const Image gt = testutil::random_uniform_image(32, 32, 1);
    const Image noise = testutil::random_image(32, 32, 2);
    double prev = std::numeric_limits<double>::infinity();
    for (double amp : {0.01, 0.02, 0.05, 0.1, 0.2}) {
        Image r = gt;
        axpy(amp, noise.values(), r.values());
        const double p = psnr(r, gt);
        CHECK(p < prev);
        prev = p;
    }
}

TEST_CASE("ssim of identical images is exactly one") {
    const Image a = testutil::random_uniform_image(40, 33, 5);
    CHECK(ssim(a, a) == 1.0);
    const auto q = evaluate_quality(a, a);
    CHECK(q.ssim == 1.0);
    CHECK(std::isinf(q.psnr_db));
}

TEST_CASE("ssim of two constants reduces to the luminance term") {
    const double expect = (2 * 0.5 * 0.6 + 1e-4) / (0.25 + 0.36 + 1e-4);
    CHECK(ssim(Image(20, 20, 0.5), Image(20, 20, 0.6)) == doctest::Approx(expect).epsilon(1e-10));
    CHECK(expect == doctest::Approx(0.9836).epsilon(1e-4));
}

TEST_CASE("ssim matches a window-by-window reference") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const Image a = testutil::random_uniform_image(24, 30, 10 + seed);
        Image b = testutil::random_uniform_image(24, 30, 20 + seed);
        if (seed % 2) axpy(1.0, a.values(), b.values());  // correlated pair
        CHECK(std::abs(ssim(a, b) - reference_ssim(a, b)) < 1e-6);
    }
}

TEST_CASE("ssim is symmetric and scales with its dynamic range") {
    const Image a = testutil::random_uniform_image(30, 30, 1);
    const Image b = testutil::random_uniform_image(30, 30, 2);
    CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-14));
    for (double s : {0.5, 3.0, 255.0}) {
        Image as = a, bs = b;
        for (double& v : as.data()) v *= s;
        for (double& v : bs.data()) v *= s;
        SsimParams p;
        p.dynamic_range = s;
        CHECK(ssim(as, bs, p) == doctest::Approx(ssim(a, b)).epsilon(1e-10));
        CHECK(std::abs(reference_ssim(as, bs, s) - ssim(as, bs, p)) < 1e-6);
    }
    CHECK_THROWS_AS(ssim(Image(10, 20), Image(10, 20)), DimensionMismatch);
    CHECK_THROWS_AS(ssim(Image(20, 20), Image(20, 21)), DimensionMismatch);
}

TEST_CASE("clip and scale maps reconstructions onto [0, 1]") {
    const Image r(1, 4, std::vector<double>{-2.0, 0.0, 1.0, 4.0});
    const Image s = clip_and_scale(r);
    CHECK(s == Image(1, 4, std::vector<double>{0.0, 0.0, 0.25, 1.0}));
    CHECK(clip_and_scale(Image(2, 2, -1.0)) == Image(2, 2, 0.0));
}
