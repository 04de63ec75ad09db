#include "pat/tv.hpp"

#include <algorithm>
#include <cmath>

#include "pat/error.hpp"

namespace pat {

void gradient(const Image& u, Image& gx, Image& gy) {
    const std::size_t h = u.rows(), w = u.cols();
    gx = Image(h, w);
    gy = Image(h, w);
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            if (j + 1 < w) gx(i, j) = u(i, j + 1) - u(i, j);
            if (i + 1 < h) gy(i, j) = u(i + 1, j) - u(i, j);
        }
    }
}

Image divergence(const Image& px, const Image& py) {
    if (!px.same_shape(py)) throw DimensionMismatch("divergence: component shapes differ");
    const std::size_t h = px.rows(), w = px.cols();
    Image d(h, w);
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            double v = 0.0;
            if (j + 1 < w) v += px(i, j);
            if (j > 0) v -= px(i, j - 1);
            if (i + 1 < h) v += py(i, j);
            if (i > 0) v -= py(i - 1, j);
            d(i, j) = v;
        }
    }
    return d;
}

double total_variation(const Image& u) {
    Image gx, gy;
    gradient(u, gx, gy);
    double tv = 0.0;
    for (std::size_t q = 0; q < u.size(); ++q)
        tv += std::hypot(gx.data()[q], gy.data()[q]);
    return tv;
}

namespace {

// u = P_C(v + weight * div p)
void primal_from_dual(const Image& v, double weight, const Image& px, const Image& py,
                      bool nonneg, Image& u) {
    const Image d = divergence(px, py);
    u = v;
    for (std::size_t q = 0; q < u.size(); ++q) {
        double val = v.data()[q] + weight * d.data()[q];
        if (nonneg) val = std::max(val, 0.0);
        u.data()[q] = val;
    }
}

} // namespace

Image tv_prox(const Image& v, double weight, int n_inner, bool nonneg) {
    if (!(weight >= 0.0)) throw InvalidArgument("tv_prox weight must be >= 0");
    if (n_inner < 1) throw InvalidArgument("tv_prox needs at least one inner iteration");

    Image u;
    const std::size_t h = v.rows(), w = v.cols();
    if (weight == 0.0) {
        u = v;
        if (nonneg)
            for (double& x : u.data()) x = std::max(x, 0.0);
        return u;
    }

    // Dual Lipschitz constant is w^2 ||grad||^2 <= 8 w^2.
    const double step = 1.0 / (8.0 * weight);
    Image px(h, w), py(h, w);      // current dual iterate
    Image rx(h, w), ry(h, w);      // extrapolated point
    Image gx, gy;
    double t = 1.0;
    for (int k = 0; k < n_inner; ++k) {
        primal_from_dual(v, weight, rx, ry, nonneg, u);
        gradient(u, gx, gy);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double beta = (t - 1.0) / t_next;
        for (std::size_t q = 0; q < u.size(); ++q) {
            // The dual objective's gradient is -w grad(u).
            double ax = rx.data()[q] + step * gx.data()[q];
            double ay = ry.data()[q] + step * gy.data()[q];
            const double nrm = std::max(1.0, std::hypot(ax, ay));
            ax /= nrm;
            ay /= nrm;
            rx.data()[q] = ax + beta * (ax - px.data()[q]);
            ry.data()[q] = ay + beta * (ay - py.data()[q]);
            px.data()[q] = ax;
            py.data()[q] = ay;
        }
        t = t_next;
    }
    primal_from_dual(v, weight, px, py, nonneg, u);
    return u;
}

} // namespace pat
