#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pat/geometry.hpp"
#include "pat/image.hpp"
#include "pat/wavesim.hpp"

namespace pat {

/// Ns x H x W stack, channel-major. Channel s holds sensor s's trace mapped
/// onto the imaging grid by time of flight.
struct PixelInterpTensor {
    std::size_t n_sensors = 0;
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> values;

    double& at(std::size_t s, std::size_t i, std::size_t j) noexcept {
        return values[(s * height + i) * width + j];
    }
    double at(std::size_t s, std::size_t i, std::size_t j) const noexcept {
        return values[(s * height + i) * width + j];
    }
    std::span<const double> channel(std::size_t s) const noexcept {
        return std::span<const double>(values).subspan(s * height * width, height * width);
    }
    Image channel_image(std::size_t s) const;
    /// Sum over channels.
    Image channel_sum() const;
};

struct PixelInterpOptions {
    // Multiply each sample by sqrt(distance in pixels) to undo cylindrical
    // spreading. Off by default: the raw mapped values go to the network.
    bool spreading_compensation = false;
};

/// For every sensor s and pixel (i, j): u = time_of_flight / dt, and the
/// output is the linear interpolation of y[s] at u. Samples whose upper
/// neighbour lies past the recorded window are 0.
///
/// Throws DimensionMismatch when y and the sensor array disagree.
PixelInterpTensor pixel_interpolate(const SensorData& y, const SensorArray& sensors,
                                    const Grid& grid, const Medium& medium,
                                    const PixelInterpOptions& opts = {});

/// Bilinear resize of the Ns x Nt sensor matrix (sensors -> rows, time ->
/// columns) to out_h x out_w, half-pixel aligned with edge clamping.
Image resize_sensor_data(const SensorData& y, std::size_t out_h, std::size_t out_w);

} // namespace pat
