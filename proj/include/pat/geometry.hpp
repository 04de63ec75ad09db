#pragma once

#include <compare>
#include <cstddef>
#include <string_view>
#include <vector>

namespace pat {

/// Grid node / pixel index, row `i` then column `j`.
struct Node {
    int i = 0;
    int j = 0;
    friend auto operator<=>(const Node&, const Node&) = default;
};

/// Imaging grid. Pixel (i, j) is centered at ((j + 0.5) dx, (i + 0.5) dx).
class Grid {
public:
    static constexpr int kMinExtent = 8;
    static constexpr double kDefaultDx = 1e-4;

    Grid(int height, int width, double dx = kDefaultDx);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    double dx() const noexcept { return dx_; }
    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
    }

    bool contains(Node n) const noexcept {
        return n.i >= 0 && n.i < height_ && n.j >= 0 && n.j < width_;
    }
    /// Node the sensor apertures are centered on: (H/2, W/2).
    Node center() const noexcept { return {height_ / 2, width_ / 2}; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int height_;
    int width_;
    double dx_;
};

/// Homogeneous acoustic medium.
struct Medium {
    double sound_speed = 1500.0;
    double density = 1000.0;

    void validate() const;
};

enum class Aperture { semicircle, full_ring };

std::string_view to_string(Aperture a) noexcept;
Aperture parse_aperture(std::string_view s);

/// Point detectors on grid nodes, ordered by increasing angle.
struct SensorArray {
    std::vector<Node> positions;
    Aperture aperture = Aperture::semicircle;

    std::size_t size() const noexcept { return positions.size(); }
};

/// Places `n_sensors` detectors on a circle of diameter `diameter_px` around
/// Grid::center(). Semicircle angles are pi*k/(n-1) (endpoints included,
/// upper half of the image i.e. towards row 0); full ring angles are
/// 2*pi*k/n. Angles are measured from the +column axis. Each position is
/// snapped to the nearest node, ties toward the smaller index.
///
/// Throws DuplicateSensor when two detectors snap to the same node and
/// OutOfGrid when a detector falls outside the grid.
SensorArray make_sensor_array(const Grid& grid, int n_sensors, double diameter_px,
                              Aperture aperture);

/// Euclidean pixel-center distance in pixels.
double distance_px(Node a, Node b) noexcept;

/// Acoustic flight time in seconds between two grid nodes.
double time_of_flight(const Grid& grid, Node pixel, Node sensor, const Medium& medium);

/// Largest flight distance (pixels) from any pixel of the grid to any sensor.
double max_flight_distance_px(const Grid& grid, const SensorArray& sensors);

} // namespace pat
