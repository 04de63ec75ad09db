#pragma once

#include <limits>

#include "pat/image.hpp"

namespace pat {

struct QualityReport {
    double psnr_db = 0.0;
    double ssim = 0.0;
};

/// 10 log10(peak^2 / MSE); +infinity for identical images.
double psnr(const Image& recon, const Image& gt, double peak = 1.0);

struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

/// Mean of the local SSIM map over all fully contained 11x11 Gaussian windows.
double ssim(const Image& recon, const Image& gt, const SsimParams& params = {});

QualityReport evaluate_quality(const Image& recon, const Image& gt, double peak = 1.0);

/// Maps a raw reconstruction onto the [0, 1] scale of the ground truth before
/// scoring: negatives are clipped, then the image is divided by its maximum.
/// An all-nonpositive image becomes all zeros.
Image clip_and_scale(const Image& recon);

} // namespace pat
