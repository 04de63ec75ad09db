#pragma once

#include <cstdint>

#include "pat/datastore.hpp"
#include "pat/geometry.hpp"
#include "pat/image.hpp"
#include "pat/phantoms.hpp"
#include "pat/pixelwise.hpp"
#include "pat/wavesim.hpp"

namespace pat {

Tensor image_tensor(const Image& img, std::string name, std::string role);
/// [1, H, W] variant used for single-channel network inputs.
Tensor channel_tensor(const Image& img, std::string name, std::string role);
Tensor interp_tensor(const PixelInterpTensor& t, std::string name, std::string role);
Tensor sensor_tensor(const SensorData& y, std::string name, std::string role);

/// Reads a 2D tensor (or a [1, H, W] one) back into an image.
Image tensor_image(const Tensor& t);
SensorData tensor_sensor_data(const Tensor& t, double dt);

/// Network input for one simulated measurement: time reversal for `post`,
/// pixel-wise interpolation for `pixel`, resized sensor data for `mdirect`.
Tensor mode_input(DatasetMode mode, const SensorData& y, WaveSimulator& sim, std::string name);

struct ExportOptions {
    DatasetMode mode = DatasetMode::pixel;
    std::size_t n_items = 0;
    std::uint64_t master_seed = 0;
    Split split = Split::train;
    // seed and crop_size are taken from master_seed and the grid.
    AugmentConfig augment;
};

/// For item i: x_i = augment(phantom_source, seed, i), y_i = forward(x_i),
/// input_i = mode_input(y_i). Stores (input_i, x_i) pairs plus metadata.
DatasetContainer export_training_pairs(const Image& phantom_source, const Grid& grid,
                                       const SensorArray& sensors, const SimConfig& sim_cfg,
                                       const ExportOptions& opts);

} // namespace pat
