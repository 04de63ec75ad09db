#include "pat/wavesim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pat/error.hpp"

namespace pat {

namespace {

// Distance (pixels) the wave travels between the first and last sample.
double travel_px(std::size_t n_steps, const SimConfig& cfg) {
    return static_cast<double>(n_steps - 1) * cfg.cfl;
}

// A wrapped copy of a pixel is at least `padded - (extent - 1)` pixels away
// from every node of the imaging region along each axis.
std::size_t padded_extent(int extent, double travel, int pad_factor) {
    const auto n = static_cast<std::size_t>(extent);
    if (pad_factor > 0) return n * static_cast<std::size_t>(pad_factor);
    const auto need = static_cast<std::size_t>(std::ceil(travel - 1e-9)) + (n - 1);
    return next_fft_size(std::max(need, n));
}

} // namespace

struct WaveSimulator::Layout {
    double dt;
    std::size_t n_steps;
    std::size_t rows;
    std::size_t cols;
};

WaveSimulator::Layout WaveSimulator::plan(const Grid& grid, const SensorArray& sensors,
                                          const SimConfig& cfg) {
    cfg.validate();
    if (sensors.size() == 0) throw InvalidArgument("sensor array is empty");
    for (const Node& s : sensors.positions) {
        if (!grid.contains(s)) throw OutOfGrid("sensor lies outside the imaging grid");
    }
    Layout l{};
    l.dt = cfg.dt(grid);
    l.n_steps = cfg.n_steps > 0 ? static_cast<std::size_t>(cfg.n_steps)
                                : default_n_steps(grid, sensors, cfg);
    const double travel = travel_px(l.n_steps, cfg);
    l.rows = padded_extent(grid.height(), travel, cfg.pad_factor);
    l.cols = padded_extent(grid.width(), travel, cfg.pad_factor);

    const double budget = std::min(static_cast<double>(l.rows) - (grid.height() - 1),
                                   static_cast<double>(l.cols) - (grid.width() - 1));
    if (travel > budget + 1e-9) {
        throw WrapContamination("recording window covers " + std::to_string(travel) +
                                " px of travel but the padded grid only allows " +
                                std::to_string(budget) + " px before wrap-around");
    }
    return l;
}

void SimConfig::validate() const {
    medium.validate();
    if (!(cfl > 0.0) || cfl > 1.0) throw InvalidArgument("cfl must be in (0, 1]");
    if (n_steps < 0) throw InvalidArgument("n_steps must be >= 1 (or 0 for automatic)");
    if (pad_factor < 0) throw InvalidArgument("pad_factor must be >= 1 (or 0 for automatic)");
}

std::size_t next_fft_size(std::size_t min_size) {
    for (std::size_t n = std::max<std::size_t>(min_size, 1);; ++n) {
        std::size_t m = n;
        while (m % 2 == 0) m /= 2;
        if (m == 1 || m == 3 || m == 5) return n;
    }
}

std::size_t default_n_steps(const Grid& grid, const SensorArray& sensors, const SimConfig& cfg) {
    const double dist = max_flight_distance_px(grid, sensors);
    return static_cast<std::size_t>(std::ceil(SimConfig::kStepMargin * dist / cfg.cfl));
}

Image propagate_step(const Image& prev, const Image& curr, double dx, const SimConfig& cfg) {
    if (!prev.same_shape(curr)) throw DimensionMismatch("propagate_step: field shapes differ");
    cfg.validate();
    SpectralPropagator prop(curr.rows(), curr.cols(), dx, cfg.medium.sound_speed,
                            cfg.cfl * dx / cfg.medium.sound_speed);
    Image next(curr.rows(), curr.cols());
    prop.step(prev.values(), curr.values(), next.values());
    return next;
}

WaveSimulator::WaveSimulator(const Grid& grid, const SensorArray& sensors, const SimConfig& cfg)
    : WaveSimulator(grid, sensors, cfg, plan(grid, sensors, cfg)) {}

WaveSimulator::WaveSimulator(const Grid& grid, const SensorArray& sensors, const SimConfig& cfg,
                             const Layout& l)
    : grid_(grid),
      sensors_(sensors),
      cfg_(cfg),
      dt_(l.dt),
      n_steps_(l.n_steps),
      row_offset_((l.rows - static_cast<std::size_t>(grid.height())) / 2),
      col_offset_((l.cols - static_cast<std::size_t>(grid.width())) / 2),
      prop_(l.rows, l.cols, grid.dx(), cfg.medium.sound_speed, l.dt) {
    sensor_index_.reserve(sensors.size());
    for (const Node& s : sensors.positions) {
        sensor_index_.push_back((static_cast<std::size_t>(s.i) + row_offset_) * l.cols +
                                static_cast<std::size_t>(s.j) + col_offset_);
    }
}

void WaveSimulator::check_image(const Image& x) const {
    if (x.rows() != static_cast<std::size_t>(grid_.height()) ||
        x.cols() != static_cast<std::size_t>(grid_.width())) {
        throw DimensionMismatch("image is " + std::to_string(x.rows()) + "x" +
                                std::to_string(x.cols()) + ", grid is " +
                                std::to_string(grid_.height()) + "x" +
                                std::to_string(grid_.width()));
    }
}

void WaveSimulator::check_data(const SensorData& y) const {
    if (y.n_sensors != sensors_.size() || y.n_steps != n_steps_ ||
        y.values.size() != y.n_sensors * y.n_steps) {
        throw DimensionMismatch("sensor data is " + std::to_string(y.n_sensors) + "x" +
                                std::to_string(y.n_steps) + ", simulator expects " +
                                std::to_string(sensors_.size()) + "x" + std::to_string(n_steps_));
    }
}

void WaveSimulator::embed(const Image& x, std::span<double> field) const {
    std::fill(field.begin(), field.end(), 0.0);
    const std::size_t cols = prop_.cols();
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto row = x.values().subspan(i * x.cols(), x.cols());
        std::copy(row.begin(), row.end(), field.begin() + (i + row_offset_) * cols + col_offset_);
    }
}

Image WaveSimulator::crop(std::span<const double> field) const {
    Image out(static_cast<std::size_t>(grid_.height()), static_cast<std::size_t>(grid_.width()));
    const std::size_t cols = prop_.cols();
    for (std::size_t i = 0; i < out.rows(); ++i) {
        const auto src = field.subspan((i + row_offset_) * cols + col_offset_, out.cols());
        std::copy(src.begin(), src.end(), out.values().begin() + i * out.cols());
    }
    return out;
}

SensorData WaveSimulator::forward(const Image& x) {
    check_image(x);
    SensorData y(sensors_.size(), n_steps_, dt_);
    std::vector<double> field(prop_.size());
    embed(x, field);

    auto sample = [&](std::size_t n) {
        for (std::size_t s = 0; s < sensor_index_.size(); ++s) y.at(s, n) = field[sensor_index_[s]];
    };
    sample(0);
    if (n_steps_ == 1) return y;

    // The recursion runs on spectra, where C is the diagonal cos(c|k|dt);
    // one inverse transform per sample is all that is left.
    const auto& cosk = prop_.cos_dt();
    Spectrum curr;
    prop_.to_spectrum(field, curr);
    Spectrum prev(curr.size());
    // p(-dt) = p(+dt) for a field starting at rest.
    for (std::size_t q = 0; q < curr.size(); ++q) prev[q] = cosk[q] * curr[q];

    for (std::size_t n = 1; n < n_steps_; ++n) {
        for (std::size_t q = 0; q < curr.size(); ++q) prev[q] = 2.0 * cosk[q] * curr[q] - prev[q];
        std::swap(prev, curr);
        prop_.from_spectrum(curr, field);
        sample(n);
    }
    return y;
}

Image WaveSimulator::adjoint(const SensorData& y) {
    check_data(y);
    // Transposed recursion, run backwards on spectra:
    //   q_n = S^T y_n + 2 C q_{n+1} - q_{n+2}   (n >= 1)
    //   q_0 = S^T y_0 + C q_1 - q_2             (transpose of the seeding p_1 = C p_0)
    // `a` holds q_{n+1}, `b` holds q_{n+2}.
    const auto& cosk = prop_.cos_dt();
    Spectrum a(prop_.spectrum_size());
    Spectrum b(prop_.spectrum_size());
    Spectrum injected;
    std::vector<double> sparse(prop_.size(), 0.0);

    for (std::size_t n = n_steps_; n-- > 1;) {
        for (std::size_t s = 0; s < sensor_index_.size(); ++s) sparse[sensor_index_[s]] += y.at(s, n);
        prop_.to_spectrum(sparse, injected);
        for (std::size_t idx : sensor_index_) sparse[idx] = 0.0;
        for (std::size_t q = 0; q < b.size(); ++q) b[q] = 2.0 * cosk[q] * a[q] - b[q] + injected[q];
        std::swap(a, b);
    }
    for (std::size_t q = 0; q < b.size(); ++q) b[q] = cosk[q] * a[q] - b[q];
    std::vector<double> q0(prop_.size());
    prop_.from_spectrum(b, q0);
    for (std::size_t s = 0; s < sensor_index_.size(); ++s) q0[sensor_index_[s]] += y.at(s, 0);
    return crop(q0);
}

Image WaveSimulator::time_reversal(const SensorData& y) {
    check_data(y);
    std::vector<double> later(prop_.size(), 0.0);  // r_{n+1}
    std::vector<double> curr(prop_.size(), 0.0);   // r_n

    auto enforce = [&](std::size_t n) {
        for (std::size_t s = 0; s < sensor_index_.size(); ++s) curr[sensor_index_[s]] = y.at(s, n);
    };

    enforce(n_steps_ - 1);
    for (std::size_t n = n_steps_ - 1; n > 0; --n) {
        prop_.step(later, curr, later);
        std::swap(later, curr);
        enforce(n - 1);
    }
    return crop(curr);
}

SensorData forward(const Image& x, const Grid& grid, const SensorArray& sensors,
                   const SimConfig& cfg) {
    return WaveSimulator(grid, sensors, cfg).forward(x);
}

Image adjoint(const SensorData& y, const Grid& grid, const SensorArray& sensors,
              const SimConfig& cfg) {
    return WaveSimulator(grid, sensors, cfg).adjoint(y);
}

Image time_reversal(const SensorData& y, const Grid& grid, const SensorArray& sensors,
                    const SimConfig& cfg) {
    return WaveSimulator(grid, sensors, cfg).time_reversal(y);
}

} // namespace pat
