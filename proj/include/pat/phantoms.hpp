#pragma once

#include <cstdint>
#include <vector>

#include "pat/image.hpp"

namespace pat {

inline constexpr int kDefaultPhantomSize = 340;

/// Branching vessel-like structures in [0, 1], a pure function of `seed`.
Image synth_vasculature(std::uint64_t seed, int size = kDefaultPhantomSize);

struct AugmentConfig {
    double scale_min = 0.5;
    double scale_max = 2.0;
    double rotation_min_deg = 0.0;
    double rotation_max_deg = 360.0;  // half-open
    int crop_size = 128;
    int shift_max_px = 10;
    int max_layers = 5;
    std::uint64_t seed = 0;

    void validate() const;
};

/// The individual layers (before summation) of one augmentation draw.
std::vector<Image> augment_layers(const Image& base, const AugmentConfig& cfg,
                                  std::uint64_t draw_index);

/// Sum of 1..max_layers scaled, rotated, cropped and shifted copies of
/// `base`, normalized to [0, 1]. Deterministic in (cfg.seed, draw_index).
Image augment(const Image& base, const AugmentConfig& cfg, std::uint64_t draw_index);

/// (img - min) / (max - min). Throws DegenerateRange for constant images.
Image normalize(const Image& img);

/// Bilinear sample with zeros outside the image.
double sample_bilinear(const Image& img, double row, double col) noexcept;

} // namespace pat
