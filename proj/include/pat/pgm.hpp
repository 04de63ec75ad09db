#pragma once

#include <filesystem>

#include "pat/image.hpp"

namespace pat {

struct Window {
    double lo = 0.0;
    double hi = 1.0;
};

/// Min-max window of an image (hi > lo is not guaranteed for constant input).
Window minmax_window(const Image& img);

/// Binary 8-bit PGM (P5); values are mapped linearly from [lo, hi] to
/// [0, 255] and clamped.
void write_pgm(const std::filesystem::path& path, const Image& img, Window window);

/// Reads P5 or P2 grayscale with maxval <= 65535 into [0, 1].
Image read_pgm(const std::filesystem::path& path);

} // namespace pat
