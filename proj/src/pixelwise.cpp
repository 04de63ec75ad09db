#include "pat/pixelwise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pat/error.hpp"

namespace pat {

Image PixelInterpTensor::channel_image(std::size_t s) const {
    const auto ch = channel(s);
    return Image(height, width, std::vector<double>(ch.begin(), ch.end()));
}

Image PixelInterpTensor::channel_sum() const {
    Image out(height, width);
    auto dst = out.values();
    for (std::size_t s = 0; s < n_sensors; ++s) {
        const auto ch = channel(s);
        for (std::size_t q = 0; q < dst.size(); ++q) dst[q] += ch[q];
    }
    return out;
}

PixelInterpTensor pixel_interpolate(const SensorData& y, const SensorArray& sensors,
                                    const Grid& grid, const Medium& medium,
                                    const PixelInterpOptions& opts) {
    if (y.n_sensors != sensors.size()) {
        throw DimensionMismatch("sensor data has " + std::to_string(y.n_sensors) +
                                " traces but the array has " + std::to_string(sensors.size()) +
                                " sensors");
    }
    if (y.values.size() != y.n_sensors * y.n_steps)
        throw DimensionMismatch("sensor data buffer does not match its declared shape");
    if (!(y.dt > 0.0)) throw InvalidArgument("sensor data dt must be > 0");
    medium.validate();

    PixelInterpTensor out;
    out.n_sensors = sensors.size();
    out.height = static_cast<std::size_t>(grid.height());
    out.width = static_cast<std::size_t>(grid.width());
    out.values.assign(out.n_sensors * out.height * out.width, 0.0);

    // u = tof / dt with tof = |pixel - sensor| dx / c, the same arithmetic as time_of_flight.
    const double dx = grid.dx(), c = medium.sound_speed, dt = y.dt;
    const auto nt = static_cast<double>(y.n_steps);
    for (std::size_t s = 0; s < out.n_sensors; ++s) {
        const Node sensor = sensors.positions[s];
        if (!grid.contains(sensor)) throw OutOfGrid("sensor lies outside the imaging grid");
        const auto trace = y.trace(s);
        double* dst = out.values.data() + s * out.height * out.width;
        for (int i = 0; i < grid.height(); ++i) {
            const auto di = static_cast<double>(i - sensor.i);
            for (int j = 0; j < grid.width(); ++j, ++dst) {
                const auto dj = static_cast<double>(j - sensor.j);
                const double dist = std::sqrt(di * di + dj * dj);
                const double u = dist * dx / c / dt;
                const double lo = std::floor(u);
                if (std::ceil(u) >= nt) continue;
                const auto k = static_cast<std::size_t>(lo);
                const double frac = u - lo;
                double v = (1.0 - frac) * trace[k];
                if (frac > 0.0) v += frac * trace[k + 1];
                if (opts.spreading_compensation) v *= std::sqrt(dist);
                *dst = v;
            }
        }
    }
    return out;
}

namespace {

// Source coordinate of output sample `o` for a half-pixel aligned resize,
// split into a clamped base index and weight.
struct Tap {
    std::size_t lo;
    std::size_t hi;
    double w;
};

std::vector<Tap> taps(std::size_t in, std::size_t out) {
    std::vector<Tap> t(out);
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    const double last = static_cast<double>(in - 1);
    for (std::size_t o = 0; o < out; ++o) {
        const double src = std::clamp((static_cast<double>(o) + 0.5) * scale - 0.5, 0.0, last);
        const double base = std::floor(src);
        const auto lo = static_cast<std::size_t>(base);
        t[o] = {lo, std::min(lo + 1, in - 1), src - base};
    }
    return t;
}

} // namespace

Image resize_sensor_data(const SensorData& y, std::size_t out_h, std::size_t out_w) {
    if (out_h < 2 || out_w < 2) throw InvalidArgument("resize target must be at least 2x2");
    if (y.n_sensors == 0 || y.n_steps == 0 || y.values.size() != y.n_sensors * y.n_steps)
        throw DimensionMismatch("sensor data buffer does not match its declared shape");

    // Separable: interpolate along time first, then across sensors.
    const auto col_taps = taps(y.n_steps, out_w);
    Image along_time(y.n_sensors, out_w);
    for (std::size_t s = 0; s < y.n_sensors; ++s) {
        const auto tr = y.trace(s);
        for (std::size_t c = 0; c < out_w; ++c) {
            const Tap& t = col_taps[c];
            along_time(s, c) = (1.0 - t.w) * tr[t.lo] + t.w * tr[t.hi];
        }
    }

    const auto row_taps = taps(y.n_sensors, out_h);
    Image out(out_h, out_w);
    for (std::size_t r = 0; r < out_h; ++r) {
        const Tap& t = row_taps[r];
        for (std::size_t c = 0; c < out_w; ++c)
            out(r, c) = (1.0 - t.w) * along_time(t.lo, c) + t.w * along_time(t.hi, c);
    }
    return out;
}

} // namespace pat
