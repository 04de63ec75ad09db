#include "pat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pat/error.hpp"

namespace pat {

namespace {

// Nearest integer with exact .5 ties going down.
int snap(double v) { return static_cast<int>(std::ceil(v - 0.5)); }

} // namespace

Grid::Grid(int height, int width, double dx) : height_(height), width_(width), dx_(dx) {
    if (height < kMinExtent || width < kMinExtent) {
        throw InvalidArgument("grid must be at least 8x8, got " + std::to_string(height) + "x" +
                              std::to_string(width));
    }
    if (!(dx > 0.0) || !std::isfinite(dx)) throw InvalidArgument("grid spacing dx must be > 0");
}

void Medium::validate() const {
    if (!(sound_speed > 0.0) || !std::isfinite(sound_speed))
        throw InvalidArgument("sound speed must be > 0");
    if (!(density > 0.0) || !std::isfinite(density)) throw InvalidArgument("density must be > 0");
}

std::string_view to_string(Aperture a) noexcept {
    return a == Aperture::semicircle ? "semicircle" : "full_ring";
}

Aperture parse_aperture(std::string_view s) {
    if (s == "semicircle") return Aperture::semicircle;
    if (s == "full_ring" || s == "ring") return Aperture::full_ring;
    throw InvalidArgument("unknown aperture '" + std::string(s) + "'");
}

SensorArray make_sensor_array(const Grid& grid, int n_sensors, double diameter_px,
                              Aperture aperture) {
    if (n_sensors < 2) throw InvalidArgument("need at least 2 sensors");
    if (!(diameter_px > 0.0) || diameter_px > std::min(grid.height(), grid.width())) {
        throw InvalidArgument("sensor diameter must be in (0, min(height, width)]");
    }

    const double radius = 0.5 * diameter_px;
    const Node c = grid.center();
    SensorArray out;
    out.aperture = aperture;
    out.positions.reserve(static_cast<std::size_t>(n_sensors));

    for (int k = 0; k < n_sensors; ++k) {
        const double theta = aperture == Aperture::semicircle
                                 ? std::numbers::pi * k / (n_sensors - 1)
                                 : 2.0 * std::numbers::pi * k / n_sensors;
        const Node node{snap(c.i - radius * std::sin(theta)), snap(c.j + radius * std::cos(theta))};
        if (!grid.contains(node)) {
            throw OutOfGrid("sensor " + std::to_string(k) + " at (" + std::to_string(node.i) + ", " +
                            std::to_string(node.j) + ") is outside the grid");
        }
        if (std::find(out.positions.begin(), out.positions.end(), node) != out.positions.end()) {
            throw DuplicateSensor("sensor " + std::to_string(k) + " snaps onto node (" +
                                  std::to_string(node.i) + ", " + std::to_string(node.j) +
                                  ") already taken");
        }
        out.positions.push_back(node);
    }
    return out;
}

double distance_px(Node a, Node b) noexcept {
    const auto di = static_cast<double>(a.i - b.i), dj = static_cast<double>(a.j - b.j);
    return std::sqrt(di * di + dj * dj);
}

double time_of_flight(const Grid& grid, Node pixel, Node sensor, const Medium& medium) {
    return distance_px(pixel, sensor) * grid.dx() / medium.sound_speed;
}

double max_flight_distance_px(const Grid& grid, const SensorArray& sensors) {
    // The farthest pixel from any point is one of the four corners.
    const Node corners[] = {{0, 0},
                            {0, grid.width() - 1},
                            {grid.height() - 1, 0},
                            {grid.height() - 1, grid.width() - 1}};
    double best = 0.0;
    for (const Node& s : sensors.positions)
        for (const Node& c : corners) best = std::max(best, distance_px(s, c));
    return best;
}

} // namespace pat
