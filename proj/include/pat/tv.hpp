#pragma once

#include "pat/image.hpp"

namespace pat {

/// Forward differences with replicate boundary: gx(i, W-1) = 0, gy(H-1, j) = 0.
void gradient(const Image& u, Image& gx, Image& gy);

/// Negative transpose of gradient(): <grad u, p> = -<u, div p>.
Image divergence(const Image& px, const Image& py);

/// Isotropic total variation, sum of sqrt(gx^2 + gy^2).
double total_variation(const Image& u);

/// Approximates argmin_u 0.5 ||u - v||^2 + weight * TV(u) (optionally with
/// u >= 0) by `n_inner` iterations of fast gradient projection on the dual.
Image tv_prox(const Image& v, double weight, int n_inner, bool nonneg = false);

} // namespace pat
