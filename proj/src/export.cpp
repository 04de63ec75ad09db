#include "pat/export.hpp"

#include <string>

#include "pat/error.hpp"

namespace pat {

namespace {

std::vector<float> to_f32(std::span<const double> v) { return {v.begin(), v.end()}; }

} // namespace

Tensor image_tensor(const Image& img, std::string name, std::string role) {
    return {std::move(name), {img.rows(), img.cols()}, std::move(role), to_f32(img.values())};
}

Tensor channel_tensor(const Image& img, std::string name, std::string role) {
    return {std::move(name), {1, img.rows(), img.cols()}, std::move(role), to_f32(img.values())};
}

Tensor interp_tensor(const PixelInterpTensor& t, std::string name, std::string role) {
    return {std::move(name), {t.n_sensors, t.height, t.width}, std::move(role), to_f32(t.values)};
}

Tensor sensor_tensor(const SensorData& y, std::string name, std::string role) {
    return {std::move(name), {y.n_sensors, y.n_steps}, std::move(role), to_f32(y.values)};
}

Image tensor_image(const Tensor& t) {
    std::size_t rows = 0, cols = 0;
    if (t.shape.size() == 2) {
        rows = t.shape[0];
        cols = t.shape[1];
    } else if (t.shape.size() == 3 && t.shape[0] == 1) {
        rows = t.shape[1];
        cols = t.shape[2];
    } else {
        throw ShapeMismatch("tensor '" + t.name + "' is not a single image");
    }
    return Image(rows, cols, std::vector<double>(t.data.begin(), t.data.end()));
}

SensorData tensor_sensor_data(const Tensor& t, double dt) {
    if (t.shape.size() != 2) throw ShapeMismatch("tensor '" + t.name + "' is not sensor data");
    SensorData y(t.shape[0], t.shape[1], dt);
    std::copy(t.data.begin(), t.data.end(), y.values.begin());
    return y;
}

Tensor mode_input(DatasetMode mode, const SensorData& y, WaveSimulator& sim, std::string name) {
    const Grid& g = sim.grid();
    switch (mode) {
    case DatasetMode::post: return channel_tensor(sim.time_reversal(y), std::move(name), "input");
    case DatasetMode::pixel:
        return interp_tensor(pixel_interpolate(y, sim.sensors(), g, sim.config().medium),
                             std::move(name), "input");
    case DatasetMode::mdirect:
        return channel_tensor(resize_sensor_data(y, static_cast<std::size_t>(g.height()),
                                                 static_cast<std::size_t>(g.width())),
                              std::move(name), "input");
    case DatasetMode::raw: break;
    }
    throw InvalidArgument("mode_input needs one of post, pixel, mdirect");
}

DatasetContainer export_training_pairs(const Image& phantom_source, const Grid& grid,
                                       const SensorArray& sensors, const SimConfig& sim_cfg,
                                       const ExportOptions& opts) {
    if (opts.mode == DatasetMode::raw)
        throw InvalidArgument("export mode must be post, pixel or mdirect");
    if (grid.height() != grid.width())
        throw InvalidArgument("training export expects a square grid");

    AugmentConfig aug = opts.augment;
    aug.seed = opts.master_seed;
    aug.crop_size = grid.height();

    WaveSimulator sim(grid, sensors, sim_cfg);
    DatasetContainer out;
    out.metadata.mode = opts.mode;
    out.metadata.n_sensors = sensors.size();
    out.metadata.dt = sim.dt();
    out.metadata.dx = grid.dx();
    out.metadata.sound_speed = sim_cfg.medium.sound_speed;
    out.metadata.seed = opts.master_seed;
    out.metadata.split = opts.split;
    out.metadata.extra = {{"aperture", to_string(sensors.aperture)},
                          {"grid_height", grid.height()},
                          {"grid_width", grid.width()},
                          {"n_steps", sim.n_steps()},
                          {"cfl", sim_cfg.cfl},
                          {"density", sim_cfg.medium.density},
                          {"n_items", opts.n_items}};

    out.tensors.reserve(2 * opts.n_items);
    for (std::size_t i = 0; i < opts.n_items; ++i) {
        const Image x = augment(phantom_source, aug, i);
        const SensorData y = sim.forward(x);
        out.tensors.push_back(mode_input(opts.mode, y, sim, input_name(i)));
        out.tensors.push_back(image_tensor(x, target_name(i), "target"));
    }
    return out;
}

} // namespace pat
