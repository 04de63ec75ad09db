#include <doctest.h>

#include <algorithm>
#include <set>

#include "pat/error.hpp"
#include "pat/phantoms.hpp"
#include "pat/random.hpp"

using namespace pat;

TEST_CASE("xoshiro256** reproduces reference outputs") {
    // Values from an independent implementation of SplitMix64 seeding plus
    // xoshiro256**.
    Xoshiro256 a(0);
    CHECK(a() == 0x99ec5f36cb75f2b4ULL);
    CHECK(a() == 0xbf6e1f784956452aULL);
    CHECK(a() == 0x1a5f849d4933e6e0ULL);
    Xoshiro256 b(12345);
    CHECK(b() == 0xbe6a36374160d49bULL);
    CHECK(b() == 0x214aaa0637a688c6ULL);
    CHECK(b() == 0xf69d16de9954d388ULL);
    Xoshiro256 c(12345);
    CHECK(c.uniform() == 0.7438081631565894);
}

TEST_CASE("random helpers stay in range") {
    Xoshiro256 rng(7);
    std::set<int> seen;
    for (int k = 0; k < 10000; ++k) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const int n = rng.uniform_int(-2, 3);
        CHECK(n >= -2);
        CHECK(n <= 3);
        seen.insert(n);
    }
    CHECK(seen.size() == 6);
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(9, 4) == derive_seed(9, 4));
}

TEST_CASE("vasculature phantoms are deterministic and default to 340 px") {
    const Image a = synth_vasculature(3);
    CHECK(a.rows() == 340);
    CHECK(a.cols() == 340);
    CHECK(a == synth_vasculature(3));
    CHECK(a != synth_vasculature(4));
    const auto [lo, hi] = std::minmax_element(a.data().begin(), a.data().end());
    CHECK(*lo >= 0.0);
    CHECK(*hi <= 1.0);
    CHECK_THROWS_AS(synth_vasculature(0, 32), InvalidArgument);
}

TEST_CASE("foreground fraction stays in the calibrated band") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Image img = synth_vasculature(seed);
        const auto fg = std::count_if(img.data().begin(), img.data().end(),
                                      [](double v) { return v > 0.1; });
        const double frac = double(fg) / double(img.size());
        CHECK(frac >= 0.02);
        CHECK(frac <= 0.30);
    }
}

TEST_CASE("augmented samples are 128x128, normalized and deterministic") {
    const Image base = synth_vasculature(11);
    AugmentConfig cfg;
    cfg.seed = 99;
    for (std::uint64_t d = 0; d < 10; ++d) {
        const Image x = augment(base, cfg, d);
        CHECK(x.rows() == 128);
        CHECK(x.cols() == 128);
        const auto [lo, hi] = std::minmax_element(x.data().begin(), x.data().end());
        CHECK(*lo == 0.0);
        CHECK(*hi == 1.0);
        CHECK(x == augment(base, cfg, d));
    }
    CHECK(augment(base, cfg, 0) != augment(base, cfg, 1));
}

TEST_CASE("layer summation order does not matter") {
    const Image base = synth_vasculature(21);
    AugmentConfig cfg;
    cfg.seed = 5;
    cfg.max_layers = 5;
    for (std::uint64_t d = 0; d < 8; ++d) {
        auto layers = augment_layers(base, cfg, d);
        REQUIRE(!layers.empty());
        CHECK(layers.size() <= 5);
        Image fwd(128, 128), rev(128, 128);
        for (const Image& l : layers) axpy(1.0, l.values(), fwd.values());
        std::reverse(layers.begin(), layers.end());
        for (const Image& l : layers) axpy(1.0, l.values(), rev.values());
        const Image a = normalize(fwd), b = normalize(rev);
        for (std::size_t q = 0; q < a.size(); ++q)
            CHECK(a.data()[q] == doctest::Approx(b.data()[q]).epsilon(1e-12).scale(1));
        CHECK(a == augment(base, cfg, d));
    }
}

TEST_CASE("a base too small for the crop is rejected") {
    AugmentConfig cfg;
    cfg.scale_min = 0.5;
    cfg.scale_max = 0.6;
    CHECK_THROWS_AS(augment(Image(200, 200, 0.5), cfg, 0), DegenerateCrop);
    cfg = {};
    cfg.scale_min = 2.0;
    cfg.scale_max = 1.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.max_layers = 0;
    CHECK_THROWS_AS(augment(synth_vasculature(0), cfg, 0), InvalidArgument);
}

TEST_CASE("a blank base cannot be augmented") {
    CHECK_THROWS_AS(augment(Image(340, 340, 0.0), AugmentConfig{}, 0), DegenerateCrop);
}

TEST_CASE("normalize examples") {
    const Image a = normalize(Image(1, 2, std::vector<double>{0.0, 2.0}));
    CHECK(a(0, 0) == 0.0);
    CHECK(a(0, 1) == 1.0);
    const Image b = normalize(Image(1, 2, std::vector<double>{-1.0, 3.0}));
    CHECK(b(0, 0) == 0.0);
    CHECK(b(0, 1) == 1.0);
    const Image id(2, 2, std::vector<double>{0.0, 0.25, 0.5, 1.0});
    CHECK(normalize(id) == id);
    CHECK_THROWS_AS(normalize(Image(3, 3, 0.4)), DegenerateRange);
}

TEST_CASE("bilinear sampling pads with zeros") {
    const Image img(2, 2, std::vector<double>{1.0, 2.0, 3.0, 4.0});
    CHECK(sample_bilinear(img, 0.5, 0.5) == doctest::Approx(2.5));
    CHECK(sample_bilinear(img, 1.0, 1.0) == 4.0);
    CHECK(sample_bilinear(img, -1.0, 0.0) == 0.0);
    CHECK(sample_bilinear(img, 1.5, 1.0) == doctest::Approx(2.0));
}
