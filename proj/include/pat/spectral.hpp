#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace pat {

/// Half spectrum of a real rows x cols field, rows x (cols/2 + 1) row-major.
using Spectrum = std::vector<std::complex<double>>;

/// Exact k-space propagator for the lossless homogeneous 2D wave equation on
/// a periodic rows x cols grid.
///
/// With C = IFFT diag(cos(c |k| dt)) FFT, the pressure of the initial value
/// problem p(0) = p0, dp/dt(0) = 0 satisfies p((n+1)dt) = 2 C p(n dt) - p((n-1)dt)
/// exactly. C is real symmetric, so the same object serves the forward and
/// transposed recursions. Because C is diagonal in k-space the recursion can
/// equally be run on spectra, which is what WaveSimulator does.
///
/// Holds FFTW plans and scratch buffers; one instance must not be used from
/// two threads at once. Separate instances are independent.
class SpectralPropagator {
public:
    SpectralPropagator(std::size_t rows, std::size_t cols, double dx, double sound_speed,
                       double dt);
    ~SpectralPropagator();
    SpectralPropagator(SpectralPropagator&&) noexcept;
    SpectralPropagator& operator=(SpectralPropagator&&) noexcept;
    SpectralPropagator(const SpectralPropagator&) = delete;
    SpectralPropagator& operator=(const SpectralPropagator&) = delete;

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return rows_ * cols_; }
    std::size_t spectrum_size() const noexcept { return rows_ * (cols_ / 2 + 1); }
    double dt() const noexcept { return dt_; }

    /// Unnormalized forward transform.
    void to_spectrum(std::span<const double> field, Spectrum& out);
    /// Inverse transform including the 1/(rows*cols) factor.
    void from_spectrum(const Spectrum& in, std::span<double> field);

    /// cos(c |k| dt) per half-spectrum bin.
    const std::vector<double>& cos_dt() const noexcept { return cos_dt_; }
    /// |k| per half-spectrum bin.
    const std::vector<double>& wavenumber_magnitude() const noexcept { return kmag_; }

    /// out = C in. `out` may alias `in`.
    void apply_cosine(std::span<const double> in, std::span<double> out);

    /// out = IFFT{cos(c |k| t) FFT{in}}, the one-shot field at time t for a
    /// field at rest at t = 0. `out` may alias `in`.
    void evolve(std::span<const double> in, std::span<double> out, double t);

    /// next = 2 C curr - prev. `next` may alias `prev` but not `curr`.
    void step(std::span<const double> prev, std::span<const double> curr, std::span<double> next);

private:
    void apply_multiplier(std::span<const double> in, std::span<double> out,
                          const std::vector<double>& mult);

    struct Plans;
    std::size_t rows_;
    std::size_t cols_;
    double sound_speed_;
    double dt_;
    std::vector<double> kmag_;
    std::vector<double> cos_dt_;
    std::unique_ptr<Plans> plans_;
};

} // namespace pat
