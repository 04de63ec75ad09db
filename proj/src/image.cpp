#include "pat/image.hpp"

#include <cmath>
#include <string>

#include "pat/error.hpp"

namespace pat {

Image::Image(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionMismatch("image data length " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(rows_) + "x" +
                                std::to_string(cols_));
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionMismatch("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

void axpy(double s, std::span<const double> b, std::span<double> a) {
    if (a.size() != b.size()) throw DimensionMismatch("axpy: length mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += s * b[i];
}

} // namespace pat
