#include "pat/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pat/error.hpp"

namespace pat {

namespace {

void require_same_shape(const Image& a, const Image& b) {
    if (!a.same_shape(b)) {
        throw DimensionMismatch("images differ in shape: " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                "x" + std::to_string(b.cols()));
    }
}

std::vector<double> gaussian_kernel(int size, double sigma) {
    std::vector<double> k(static_cast<std::size_t>(size));
    const double c = 0.5 * (size - 1);
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        const double d = i - c;
        k[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += k[static_cast<std::size_t>(i)];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Separable 'valid' filtering.
Image filter_valid(const Image& img, const std::vector<double>& k) {
    const std::size_t n = k.size();
    const std::size_t oh = img.rows() - n + 1, ow = img.cols() - n + 1;
    Image tmp(img.rows(), ow);
    for (std::size_t i = 0; i < img.rows(); ++i)
        for (std::size_t j = 0; j < ow; ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t < n; ++t) s += k[t] * img(i, j + t);
            tmp(i, j) = s;
        }
    Image out(oh, ow);
    for (std::size_t i = 0; i < oh; ++i)
        for (std::size_t j = 0; j < ow; ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t < n; ++t) s += k[t] * tmp(i + t, j);
            out(i, j) = s;
        }
    return out;
}

Image product(const Image& a, const Image& b) {
    Image out(a.rows(), a.cols());
    for (std::size_t q = 0; q < a.size(); ++q) out.data()[q] = a.data()[q] * b.data()[q];
    return out;
}

} // namespace

double psnr(const Image& recon, const Image& gt, double peak) {
    require_same_shape(recon, gt);
    if (!(peak > 0.0)) throw InvalidArgument("psnr peak must be > 0");
    if (recon.empty()) throw DimensionMismatch("psnr of empty images");
    double sse = 0.0;
    for (std::size_t q = 0; q < recon.size(); ++q) {
        const double d = recon.data()[q] - gt.data()[q];
        sse += d * d;
    }
    if (sse == 0.0) return std::numeric_limits<double>::infinity();
    const double mse = sse / static_cast<double>(recon.size());
    return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Image& recon, const Image& gt, const SsimParams& p) {
    require_same_shape(recon, gt);
    const auto win = static_cast<std::size_t>(p.window);
    if (recon.rows() < win || recon.cols() < win) {
        throw DimensionMismatch("ssim needs images of at least " + std::to_string(p.window) +
                                "x" + std::to_string(p.window));
    }
    const auto k = gaussian_kernel(p.window, p.sigma);
    const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
    const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);

    const Image mu_x = filter_valid(recon, k);
    const Image mu_y = filter_valid(gt, k);
    const Image e_xx = filter_valid(product(recon, recon), k);
    const Image e_yy = filter_valid(product(gt, gt), k);
    const Image e_xy = filter_valid(product(recon, gt), k);

    double total = 0.0;
    for (std::size_t q = 0; q < mu_x.size(); ++q) {
        const double mx = mu_x.data()[q], my = mu_y.data()[q];
        const double vx = e_xx.data()[q] - mx * mx;
        const double vy = e_yy.data()[q] - my * my;
        const double cxy = e_xy.data()[q] - mx * my;
        total += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) /
                 ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
    return total / static_cast<double>(mu_x.size());
}

QualityReport evaluate_quality(const Image& recon, const Image& gt, double peak) {
    return {psnr(recon, gt, peak), ssim(recon, gt)};
}

Image clip_and_scale(const Image& recon) {
    Image out = recon;
    double hi = 0.0;
    for (double& v : out.data()) {
        v = std::max(v, 0.0);
        hi = std::max(hi, v);
    }
    if (hi > 0.0)
        for (double& v : out.data()) v /= hi;
    return out;
}

} // namespace pat
