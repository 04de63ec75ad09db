#include "pat/recon.hpp"

#include <cmath>
#include <limits>

#include "pat/error.hpp"
#include "pat/random.hpp"
#include "pat/tv.hpp"

namespace pat {

LinearModel make_linear_model(WaveSimulator& sim) {
    LinearModel m;
    m.rows = static_cast<std::size_t>(sim.grid().height());
    m.cols = static_cast<std::size_t>(sim.grid().width());
    m.data_size = sim.sensors().size() * sim.n_steps();
    m.apply = [&sim](const Image& x) { return sim.forward(x).values; };
    m.apply_adjoint = [&sim](std::span<const double> y) {
        SensorData d(sim.sensors().size(), sim.n_steps(), sim.dt());
        std::copy(y.begin(), y.end(), d.values.begin());
        return sim.adjoint(d);
    };
    return m;
}

double lipschitz_estimate(const std::function<Image(const Image&)>& normal_op,
                          std::size_t rows, std::size_t cols, int n_power_iters,
                          std::uint64_t seed) {
    if (n_power_iters < 1) throw InvalidArgument("power iteration needs at least one iteration");
    Xoshiro256 rng(seed);
    Image v(rows, cols);
    for (double& x : v.data()) x = rng.normal();

    double estimate = 0.0;
    for (int k = 0; k < n_power_iters; ++k) {
        const double nv = norm2(v.values());
        if (nv == 0.0) return 0.0;
        for (double& x : v.data()) x /= nv;
        Image w = normal_op(v);
        estimate = dot(v.values(), w.values());
        v = std::move(w);
    }
    return estimate;
}

double lipschitz_estimate(const LinearModel& model, int n_power_iters, std::uint64_t seed) {
    return lipschitz_estimate(
        [&model](const Image& x) { return model.apply_adjoint(model.apply(x)); }, model.rows,
        model.cols, n_power_iters, seed);
}

double lipschitz_estimate(const Grid& grid, const SensorArray& sensors, const SimConfig& cfg,
                          int n_power_iters, std::uint64_t seed) {
    WaveSimulator sim(grid, sensors, cfg);
    return lipschitz_estimate(make_linear_model(sim), n_power_iters, seed);
}

void TvConfig::validate() const {
    if (lambda && !(*lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
    if (n_outer < 1) throw InvalidArgument("n_outer must be >= 1");
    if (n_inner < 1) throw InvalidArgument("n_inner must be >= 1");
    if (!(tol >= 0.0)) throw InvalidArgument("tol must be >= 0");
    if (lipschitz && !(*lipschitz > 0.0)) throw InvalidArgument("lipschitz must be > 0");
    if (power_iters < 1) throw InvalidArgument("power_iters must be >= 1");
}

std::string_view to_string(FistaStatus s) noexcept {
    switch (s) {
    case FistaStatus::converged: return "converged";
    case FistaStatus::not_converged: return "not_converged";
    case FistaStatus::stalled: return "stalled";
    }
    return "unknown";
}

namespace {

double half_sq_residual(std::span<const double> ax, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t q = 0; q < y.size(); ++q) {
        const double r = ax[q] - y[q];
        s += r * r;
    }
    return 0.5 * s;
}

} // namespace

FistaResult fista_tv(std::span<const double> y, const LinearModel& model, const TvConfig& cfg) {
    cfg.validate();
    if (y.size() != model.data_size) throw DimensionMismatch("fista_tv: data size mismatch");

    FistaResult res;
    res.lipschitz = cfg.lipschitz ? *cfg.lipschitz
                                  : lipschitz_estimate(model, cfg.power_iters, cfg.seed);
    res.lambda = cfg.lambda ? *cfg.lambda
                            : TvConfig::kAutoLambdaScale * max_abs(model.apply_adjoint(y).values());
    const double step = 1.0 / res.lipschitz;
    const double y_norm = norm2(y);
    auto rel_residual = [&](std::span<const double> ax) {
        return y_norm > 0.0 ? std::sqrt(2.0 * half_sq_residual(ax, y)) / y_norm : 0.0;
    };

    Image x(model.rows, model.cols);
    std::vector<double> ax(model.data_size, 0.0);
    double f = half_sq_residual(ax, y);
    res.objective.push_back(f);
    res.relative_residual.push_back(rel_residual(ax));

    Image x_prev = x;
    std::vector<double> ax_prev = ax;
    Image z = x;
    std::vector<double> az = ax;
    double t = 1.0;
    bool momentum = false;

    for (int k = 0; k < cfg.n_outer; ++k) {
        res.iterations = k + 1;
        Image cand;
        std::vector<double> a_cand;
        double f_cand = 0.0;
        bool accepted = false;
        for (;;) {
            std::vector<double> r(az);
            for (std::size_t q = 0; q < r.size(); ++q) r[q] -= y[q];
            Image g = model.apply_adjoint(r);
            Image v = z;
            axpy(-step, g.values(), v.values());
            cand = tv_prox(v, res.lambda * step, cfg.n_inner, cfg.nonneg);
            a_cand = model.apply(cand);
            f_cand = half_sq_residual(a_cand, y) + res.lambda * total_variation(cand);
            if (f_cand <= f) {
                accepted = true;
                break;
            }
            if (!momentum) break;
            // Restart from the last accepted iterate without momentum.
            ++res.restarts;
            z = x;
            az = ax;
            t = 1.0;
            momentum = false;
        }
        if (!accepted) {
            res.status = FistaStatus::stalled;
            break;
        }

        Image diff = cand;
        axpy(-1.0, x.values(), diff.values());
        const double x_norm = norm2(x.values());
        const double d_norm = norm2(diff.values());
        res.last_relative_change = x_norm > 0.0 ? d_norm / x_norm
                                   : (d_norm > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);

        x_prev = std::move(x);
        ax_prev = std::move(ax);
        x = std::move(cand);
        ax = std::move(a_cand);
        f = f_cand;
        res.objective.push_back(f);
        res.relative_residual.push_back(rel_residual(ax));

        if (res.last_relative_change <= cfg.tol) {
            res.status = FistaStatus::converged;
            break;
        }

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double beta = (t - 1.0) / t_next;
        z = x;
        az = ax;
        if (beta != 0.0) {
            for (std::size_t q = 0; q < z.size(); ++q)
                z.data()[q] += beta * (x.data()[q] - x_prev.data()[q]);
            // A is linear, so A z follows from the stored A x without a solve.
            for (std::size_t q = 0; q < az.size(); ++q) az[q] += beta * (ax[q] - ax_prev[q]);
        }
        momentum = beta != 0.0;
        t = t_next;
    }
    res.x = std::move(x);
    return res;
}

FistaResult fista_tv(const SensorData& y, WaveSimulator& sim, const TvConfig& cfg) {
    if (y.n_sensors != sim.sensors().size() || y.n_steps != sim.n_steps())
        throw DimensionMismatch("fista_tv: sensor data does not match the simulator");
    return fista_tv(y.values, make_linear_model(sim), cfg);
}

FistaResult fista_tv(const SensorData& y, const Grid& grid, const SensorArray& sensors,
                     const SimConfig& sim_cfg, const TvConfig& tv_cfg) {
    WaveSimulator sim(grid, sensors, sim_cfg);
    return fista_tv(y, sim, tv_cfg);
}

} // namespace pat
