#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "pat/geometry.hpp"
#include "pat/image.hpp"
#include "pat/wavesim.hpp"

namespace pat {

/// A linear map x -> A x between an image space and a flat data space,
/// together with its transpose.
struct LinearModel {
    std::size_t rows = 0;  // image shape
    std::size_t cols = 0;
    std::size_t data_size = 0;
    std::function<std::vector<double>(const Image&)> apply;
    std::function<Image(std::span<const double>)> apply_adjoint;
};

/// Wraps a simulator (by reference; it must outlive the model).
LinearModel make_linear_model(WaveSimulator& sim);

/// Power iteration on A^T A from a seeded Gaussian start. Returns the
/// Rayleigh quotient of the last iterate, which never decreases with more
/// iterations.
double lipschitz_estimate(const std::function<Image(const Image&)>& normal_op,
                          std::size_t rows, std::size_t cols, int n_power_iters,
                          std::uint64_t seed);
double lipschitz_estimate(const LinearModel& model, int n_power_iters, std::uint64_t seed);
double lipschitz_estimate(const Grid& grid, const SensorArray& sensors, const SimConfig& cfg,
                          int n_power_iters, std::uint64_t seed);

struct TvConfig {
    static constexpr double kAutoLambdaScale = 1e-3;

    // Unset: kAutoLambdaScale * max|A^T y|.
    std::optional<double> lambda;
    int n_outer = 50;
    int n_inner = 20;
    bool nonneg = true;
    double tol = 1e-5;
    // Unset: estimated with `power_iters` iterations seeded by `seed`.
    std::optional<double> lipschitz;
    int power_iters = 30;
    std::uint64_t seed = 0;

    void validate() const;
};

enum class FistaStatus { converged, not_converged, stalled };
std::string_view to_string(FistaStatus s) noexcept;

struct FistaResult {
    Image x;
    FistaStatus status = FistaStatus::not_converged;
    int iterations = 0;
    int restarts = 0;
    double lambda = 0.0;
    double lipschitz = 0.0;
    double last_relative_change = 0.0;
    // Objective 0.5 ||A x - y||^2 + lambda TV(x) of every accepted iterate,
    // starting with x = 0.
    std::vector<double> objective;
    // ||A x - y|| / ||y|| of every accepted iterate.
    std::vector<double> relative_residual;
};

/// FISTA with TV proximal steps and restart on objective increase. A step
/// that still increases the objective after a restart is rejected and the
/// solver stops with FistaStatus::stalled. Not converging within n_outer is
/// reported through the status, not thrown.
FistaResult fista_tv(std::span<const double> y, const LinearModel& model, const TvConfig& cfg);
FistaResult fista_tv(const SensorData& y, WaveSimulator& sim, const TvConfig& cfg);
FistaResult fista_tv(const SensorData& y, const Grid& grid, const SensorArray& sensors,
                     const SimConfig& sim_cfg, const TvConfig& tv_cfg);

} // namespace pat
