#include "pat/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include "pat/error.hpp"

namespace pat {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Signed discrete wavenumber for FFT bin `m` of an n-point axis.
double wavenumber(std::size_t m, std::size_t n, double dx) {
    const auto sm = static_cast<long>(m);
    const auto sn = static_cast<long>(n);
    const long shifted = sm < (sn + 1) / 2 ? sm : sm - sn;
    return 2.0 * std::numbers::pi * static_cast<double>(shifted) / (static_cast<double>(sn) * dx);
}

} // namespace

// Plans use FFTW_ESTIMATE: measured plans may pick different algorithms from
// run to run, which would break bit-reproducible datasets.
struct SpectralPropagator::Plans {
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;

    Plans(std::size_t rows, std::size_t cols) {
        const std::size_t half = cols / 2 + 1;
        real = fftw_alloc_real(rows * cols);
        spec = fftw_alloc_complex(rows * half);
        std::lock_guard lock(planner_mutex());
        r2c = fftw_plan_dft_r2c_2d(static_cast<int>(rows), static_cast<int>(cols), real, spec,
                                   FFTW_ESTIMATE);
        c2r = fftw_plan_dft_c2r_2d(static_cast<int>(rows), static_cast<int>(cols), spec, real,
                                   FFTW_ESTIMATE);
    }
    ~Plans() {
        {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(r2c);
            fftw_destroy_plan(c2r);
        }
        fftw_free(real);
        fftw_free(spec);
    }
    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;
};

SpectralPropagator::SpectralPropagator(std::size_t rows, std::size_t cols, double dx,
                                       double sound_speed, double dt)
    : rows_(rows), cols_(cols), sound_speed_(sound_speed), dt_(dt) {
    if (rows < 2 || cols < 2) throw InvalidArgument("propagator grid must be at least 2x2");
    if (!(dx > 0.0) || !(sound_speed > 0.0) || !(dt > 0.0))
        throw InvalidArgument("propagator needs dx, sound speed and dt > 0");

    const std::size_t half = cols / 2 + 1;
    kmag_.resize(rows * half);
    cos_dt_.resize(rows * half);
    for (std::size_t a = 0; a < rows; ++a) {
        const double ky = wavenumber(a, rows, dx);
        for (std::size_t b = 0; b < half; ++b) {
            const double kx = wavenumber(b, cols, dx);
            const double k = std::sqrt(kx * kx + ky * ky);
            kmag_[a * half + b] = k;
            cos_dt_[a * half + b] = std::cos(sound_speed * k * dt);
        }
    }
    plans_ = std::make_unique<Plans>(rows, cols);
}

SpectralPropagator::~SpectralPropagator() = default;
SpectralPropagator::SpectralPropagator(SpectralPropagator&&) noexcept = default;
SpectralPropagator& SpectralPropagator::operator=(SpectralPropagator&&) noexcept = default;

void SpectralPropagator::to_spectrum(std::span<const double> field, Spectrum& out) {
    if (field.size() != size()) throw DimensionMismatch("propagator field size mismatch");
    std::copy(field.begin(), field.end(), plans_->real);
    fftw_execute(plans_->r2c);
    out.resize(spectrum_size());
    std::memcpy(static_cast<void*>(out.data()), plans_->spec, spectrum_size() * sizeof(fftw_complex));
}

void SpectralPropagator::from_spectrum(const Spectrum& in, std::span<double> field) {
    if (in.size() != spectrum_size() || field.size() != size())
        throw DimensionMismatch("propagator spectrum size mismatch");
    // c2r overwrites its input, so work on the plan's own buffer.
    std::memcpy(plans_->spec, in.data(), spectrum_size() * sizeof(fftw_complex));
    fftw_execute(plans_->c2r);
    const double scale = 1.0 / static_cast<double>(size());
    for (std::size_t q = 0; q < size(); ++q) field[q] = plans_->real[q] * scale;
}

void SpectralPropagator::apply_multiplier(std::span<const double> in, std::span<double> out,
                                          const std::vector<double>& mult) {
    if (in.size() != size() || out.size() != size())
        throw DimensionMismatch("propagator field size mismatch");
    std::copy(in.begin(), in.end(), plans_->real);
    fftw_execute(plans_->r2c);
    for (std::size_t q = 0; q < mult.size(); ++q) {
        plans_->spec[q][0] *= mult[q];
        plans_->spec[q][1] *= mult[q];
    }
    fftw_execute(plans_->c2r);
    const double scale = 1.0 / static_cast<double>(size());
    for (std::size_t q = 0; q < size(); ++q) out[q] = plans_->real[q] * scale;
}

void SpectralPropagator::apply_cosine(std::span<const double> in, std::span<double> out) {
    apply_multiplier(in, out, cos_dt_);
}

void SpectralPropagator::evolve(std::span<const double> in, std::span<double> out, double t) {
    std::vector<double> mult(kmag_.size());
    for (std::size_t q = 0; q < kmag_.size(); ++q) mult[q] = std::cos(sound_speed_ * kmag_[q] * t);
    apply_multiplier(in, out, mult);
}

void SpectralPropagator::step(std::span<const double> prev, std::span<const double> curr,
                              std::span<double> next) {
    if (prev.size() != size() || curr.size() != size() || next.size() != size())
        throw DimensionMismatch("propagator field size mismatch");
    std::copy(curr.begin(), curr.end(), plans_->real);
    fftw_execute(plans_->r2c);
    for (std::size_t q = 0; q < cos_dt_.size(); ++q) {
        plans_->spec[q][0] *= cos_dt_[q];
        plans_->spec[q][1] *= cos_dt_[q];
    }
    fftw_execute(plans_->c2r);
    const double two_scale = 2.0 / static_cast<double>(size());
    const double* c = plans_->real;
    for (std::size_t q = 0; q < size(); ++q) next[q] = two_scale * c[q] - prev[q];
}

} // namespace pat
