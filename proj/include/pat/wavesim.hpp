#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pat/geometry.hpp"
#include "pat/image.hpp"
#include "pat/spectral.hpp"

namespace pat {

struct SimConfig {
    static constexpr double kDefaultCfl = 0.3;
    static constexpr double kStepMargin = 1.2;

    Medium medium;
    double cfl = kDefaultCfl;
    // 0 selects ceil(1.2 * max pixel-to-sensor distance / (c dt)).
    int n_steps = 0;
    // 0 selects the smallest FFT-friendly padded size that meets the
    // wrap-around budget; k >= 1 forces a padded grid of k times the image.
    int pad_factor = 0;

    double dt(const Grid& grid) const { return cfl * grid.dx() / medium.sound_speed; }
    void validate() const;
};

/// Sensor time series, row-major [sensor][sample]; sample n is at time n*dt.
struct SensorData {
    std::size_t n_sensors = 0;
    std::size_t n_steps = 0;
    double dt = 0.0;
    std::vector<double> values;

    SensorData() = default;
    SensorData(std::size_t sensors, std::size_t steps, double step)
        : n_sensors(sensors), n_steps(steps), dt(step), values(sensors * steps, 0.0) {}

    double& at(std::size_t s, std::size_t n) noexcept { return values[s * n_steps + n]; }
    double at(std::size_t s, std::size_t n) const noexcept { return values[s * n_steps + n]; }
    std::span<const double> trace(std::size_t s) const noexcept {
        return std::span<const double>(values).subspan(s * n_steps, n_steps);
    }

    friend bool operator==(const SensorData&, const SensorData&) = default;
};

/// One time step of the exact k-space recursion on a periodic grid:
/// returns 2 IFFT{cos(c|k|dt) FFT{curr}} - prev with dt = cfl*dx/c.
Image propagate_step(const Image& prev, const Image& curr, double dx, const SimConfig& cfg);

/// Forward model, its exact transpose and time-reversal reconstruction for a
/// fixed imaging grid and sensor array.
///
/// The imaging grid is embedded (centered) in a larger periodic grid. The
/// number of samples is bounded so that no wrapped copy of any pixel can
/// reach a sensor within the recording window; configurations that break the
/// bound throw WrapContamination.
class WaveSimulator {
public:
    WaveSimulator(const Grid& grid, const SensorArray& sensors, const SimConfig& cfg);

    const Grid& grid() const noexcept { return grid_; }
    const SensorArray& sensors() const noexcept { return sensors_; }
    const SimConfig& config() const noexcept { return cfg_; }
    double dt() const noexcept { return dt_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    std::size_t padded_rows() const noexcept { return prop_.rows(); }
    std::size_t padded_cols() const noexcept { return prop_.cols(); }

    /// y[s][n] = p(sensor s, n dt) for p(0) = x, dp/dt(0) = 0.
    SensorData forward(const Image& x);

    /// Exact transpose of forward().
    Image adjoint(const SensorData& y);

    /// Steps the model backwards from rest at T, overwriting the pressure at
    /// each sensor node with the recorded sample at every reversed step.
    Image time_reversal(const SensorData& y);

private:
    struct Layout;
    static Layout plan(const Grid& grid, const SensorArray& sensors, const SimConfig& cfg);
    WaveSimulator(const Grid& grid, const SensorArray& sensors, const SimConfig& cfg,
                  const Layout& layout);

    void check_image(const Image& x) const;
    void check_data(const SensorData& y) const;
    void embed(const Image& x, std::span<double> field) const;
    Image crop(std::span<const double> field) const;

    Grid grid_;
    SensorArray sensors_;
    SimConfig cfg_;
    double dt_;
    std::size_t n_steps_;
    std::size_t row_offset_;
    std::size_t col_offset_;
    std::vector<std::size_t> sensor_index_;  // flat indices into the padded field
    SpectralPropagator prop_;
};

/// Default number of samples for a grid / sensor layout.
std::size_t default_n_steps(const Grid& grid, const SensorArray& sensors, const SimConfig& cfg);

/// Smallest n >= min_size of the form 2^a, 3*2^a or 5*2^a (fast FFT sizes).
std::size_t next_fft_size(std::size_t min_size);

SensorData forward(const Image& x, const Grid& grid, const SensorArray& sensors,
                   const SimConfig& cfg);
Image adjoint(const SensorData& y, const Grid& grid, const SensorArray& sensors,
              const SimConfig& cfg);
Image time_reversal(const SensorData& y, const Grid& grid, const SensorArray& sensors,
                    const SimConfig& cfg);

} // namespace pat
