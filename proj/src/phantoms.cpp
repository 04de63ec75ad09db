#include "pat/phantoms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pat/error.hpp"
#include "pat/random.hpp"

namespace pat {

namespace {

struct Walker {
    double row;
    double col;
    double heading;    // radians
    double turn_rate;  // radians per step
    double width;      // px
    double amplitude;
    int depth;
};

constexpr double kStepPx = 5.0;
constexpr double kTaper = 0.95;
constexpr double kMinWidth = 1.0;
constexpr double kSpawnProbability = 0.02;
constexpr double kMaxTurnRate = 0.12;
constexpr int kMaxDepth = 3;
constexpr int kMaxSteps = 400;

// Max-composites a Gaussian cross-section tube along segment a -> b.
void stamp_segment(Image& img, double r0, double c0, double r1, double c1, double width,
                   double amp) {
    const double sigma = 0.5 * width;
    const double reach = 3.0 * sigma + 1.0;
    const int i_lo = std::max(0, static_cast<int>(std::floor(std::min(r0, r1) - reach)));
    const int i_hi = std::min(static_cast<int>(img.rows()) - 1,
                              static_cast<int>(std::ceil(std::max(r0, r1) + reach)));
    const int j_lo = std::max(0, static_cast<int>(std::floor(std::min(c0, c1) - reach)));
    const int j_hi = std::min(static_cast<int>(img.cols()) - 1,
                              static_cast<int>(std::ceil(std::max(c0, c1) + reach)));
    const double dr = r1 - r0, dc = c1 - c0;
    const double len2 = dr * dr + dc * dc;
    const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
    for (int i = i_lo; i <= i_hi; ++i) {
        for (int j = j_lo; j <= j_hi; ++j) {
            const double pr = i - r0, pc = j - c0;
            const double s = len2 > 0.0 ? std::clamp((pr * dr + pc * dc) / len2, 0.0, 1.0) : 0.0;
            const double er = pr - s * dr, ec = pc - s * dc;
            const double v = amp * std::exp(-(er * er + ec * ec) * inv_two_sigma2);
            double& dst = img(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            dst = std::max(dst, v);
        }
    }
}

} // namespace

Image synth_vasculature(std::uint64_t seed, int size) {
    if (size < 64) throw InvalidArgument("phantom size must be >= 64");
    Xoshiro256 rng(seed);
    Image img(static_cast<std::size_t>(size), static_cast<std::size_t>(size));
    const double n = size;
    const double center = 0.5 * (n - 1.0);

    std::vector<Walker> pending;
    const int n_branches = rng.uniform_int(8, 20);
    for (int b = 0; b < n_branches; ++b) {
        // Start on a random border point, heading roughly inward.
        const int side = rng.uniform_int(0, 3);
        const double t = rng.uniform(0.0, n - 1.0);
        double r = 0.0, c = 0.0;
        switch (side) {
        case 0: r = 0.0; c = t; break;
        case 1: r = n - 1.0; c = t; break;
        case 2: r = t; c = 0.0; break;
        default: r = t; c = n - 1.0; break;
        }
        const double inward = std::atan2(center - r, center - c);
        pending.push_back({r, c, inward + rng.uniform(-0.6, 0.6), 0.0, rng.uniform(2.5, 6.0),
                           rng.uniform(0.6, 1.0), 0});
    }

    while (!pending.empty()) {
        Walker w = pending.back();
        pending.pop_back();
        for (int step = 0; step < kMaxSteps && w.width >= kMinWidth; ++step) {
            w.turn_rate = std::clamp(w.turn_rate + rng.uniform(-0.04, 0.04), -kMaxTurnRate,
                                     kMaxTurnRate);
            w.heading += w.turn_rate;
            const double nr = w.row + kStepPx * std::sin(w.heading);
            const double nc = w.col + kStepPx * std::cos(w.heading);
            stamp_segment(img, w.row, w.col, nr, nc, w.width, w.amplitude);
            w.row = nr;
            w.col = nc;
            w.width *= kTaper;
            if (w.row < -10.0 || w.row > n + 10.0 || w.col < -10.0 || w.col > n + 10.0) break;
            if (w.depth < kMaxDepth && rng.uniform() < kSpawnProbability) {
                const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
                pending.push_back({w.row, w.col, w.heading + side * rng.uniform(0.5, 1.1), 0.0,
                                   w.width * rng.uniform(0.6, 0.9),
                                   w.amplitude * rng.uniform(0.8, 1.0), w.depth + 1});
            }
        }
    }
    return img;
}

void AugmentConfig::validate() const {
    if (!(scale_min > 0.0) || !(scale_max >= scale_min))
        throw InvalidArgument("augment scale range must satisfy 0 < min <= max");
    if (!(rotation_max_deg >= rotation_min_deg))
        throw InvalidArgument("augment rotation range is empty");
    if (crop_size < 1) throw InvalidArgument("crop size must be >= 1");
    if (shift_max_px < 0) throw InvalidArgument("shift range must be >= 0");
    if (max_layers < 1) throw InvalidArgument("max_layers must be >= 1");
}

double sample_bilinear(const Image& img, double row, double col) noexcept {
    const double r0 = std::floor(row), c0 = std::floor(col);
    const double fr = row - r0, fc = col - c0;
    const auto h = static_cast<long>(img.rows()), w = static_cast<long>(img.cols());
    auto px = [&](long i, long j) {
        return (i < 0 || j < 0 || i >= h || j >= w)
                   ? 0.0
                   : img(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    };
    const auto i = static_cast<long>(r0), j = static_cast<long>(c0);
    return (1.0 - fr) * ((1.0 - fc) * px(i, j) + fc * px(i, j + 1)) +
           fr * ((1.0 - fc) * px(i + 1, j) + fc * px(i + 1, j + 1));
}

namespace {

std::vector<Image> draw_layers(const Image& base, const AugmentConfig& cfg,
                               std::uint64_t stream_seed) {
    constexpr int kMaxScaleAttempts = 10;
    Xoshiro256 rng(stream_seed);
    const int n_layers = rng.uniform_int(1, cfg.max_layers);
    const auto crop = static_cast<std::size_t>(cfg.crop_size);

    std::vector<Image> layers;
    layers.reserve(static_cast<std::size_t>(n_layers));
    for (int l = 0; l < n_layers; ++l) {
        double scale = 0.0;
        long sh = 0, sw = 0;
        int attempt = 0;
        for (; attempt < kMaxScaleAttempts; ++attempt) {
            scale = rng.uniform(cfg.scale_min, cfg.scale_max);
            sh = std::lround(scale * static_cast<double>(base.rows()));
            sw = std::lround(scale * static_cast<double>(base.cols()));
            if (sh >= cfg.crop_size && sw >= cfg.crop_size) break;
        }
        if (attempt == kMaxScaleAttempts) {
            throw DegenerateCrop("scaled image stays smaller than the " +
                                 std::to_string(cfg.crop_size) + " px crop after " +
                                 std::to_string(kMaxScaleAttempts) + " draws");
        }
        const double theta = rng.uniform(cfg.rotation_min_deg, cfg.rotation_max_deg) *
                             std::numbers::pi / 180.0;
        const int top = rng.uniform_int(0, static_cast<int>(sh) - cfg.crop_size);
        const int left = rng.uniform_int(0, static_cast<int>(sw) - cfg.crop_size);
        const int dy = rng.uniform_int(0, cfg.shift_max_px);
        const int dx = rng.uniform_int(0, cfg.shift_max_px);

        // Transformed canvas is sh x sw, rotated about its center; map each
        // destination pixel back into the base image.
        const double tc_r = 0.5 * static_cast<double>(sh - 1);
        const double tc_c = 0.5 * static_cast<double>(sw - 1);
        const double bc_r = 0.5 * static_cast<double>(base.rows() - 1);
        const double bc_c = 0.5 * static_cast<double>(base.cols() - 1);
        const double cs = std::cos(theta), sn = std::sin(theta);

        Image layer(crop, crop);
        for (std::size_t i = 0; i < crop; ++i) {
            const long src_i = static_cast<long>(i) - dy;
            if (src_i < 0) continue;
            for (std::size_t j = 0; j < crop; ++j) {
                const long src_j = static_cast<long>(j) - dx;
                if (src_j < 0) continue;
                const double r = static_cast<double>(top + src_i) - tc_r;
                const double c = static_cast<double>(left + src_j) - tc_c;
                const double br = (cs * r + sn * c) / scale + bc_r;
                const double bcol = (-sn * r + cs * c) / scale + bc_c;
                layer(i, j) = sample_bilinear(base, br, bcol);
            }
        }
        layers.push_back(std::move(layer));
    }
    return layers;
}

Image sum_layers(const std::vector<Image>& layers) {
    Image sum(layers.front().rows(), layers.front().cols());
    for (const Image& l : layers) axpy(1.0, l.values(), sum.values());
    return sum;
}

bool is_constant(const Image& img) {
    const auto [lo, hi] = std::minmax_element(img.data().begin(), img.data().end());
    return *lo == *hi;
}

} // namespace

std::vector<Image> augment_layers(const Image& base, const AugmentConfig& cfg,
                                  std::uint64_t draw_index) {
    cfg.validate();
    // A draw whose crops all miss the structure is redrawn from a derived
    // stream, so the result is still a pure function of (seed, draw_index).
    constexpr int kMaxRedraws = 16;
    const std::uint64_t stream = derive_seed(cfg.seed, draw_index);
    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
        auto layers = draw_layers(base, cfg,
                                  attempt == 0 ? stream
                                               : derive_seed(stream, static_cast<std::uint64_t>(attempt)));
        if (!is_constant(sum_layers(layers))) return layers;
    }
    throw DegenerateCrop("every augmentation draw produced a blank image");
}

Image augment(const Image& base, const AugmentConfig& cfg, std::uint64_t draw_index) {
    return normalize(sum_layers(augment_layers(base, cfg, draw_index)));
}

Image normalize(const Image& img) {
    if (img.empty()) throw DegenerateRange("cannot normalize an empty image");
    const auto [lo_it, hi_it] = std::minmax_element(img.data().begin(), img.data().end());
    const double lo = *lo_it, hi = *hi_it;
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw InvalidArgument("image has non-finite values");
    if (hi == lo) throw DegenerateRange("image is constant, cannot normalize");
    Image out = img;
    const double range = hi - lo;
    for (double& v : out.data()) v = (v - lo) / range;
    return out;
}

} // namespace pat
