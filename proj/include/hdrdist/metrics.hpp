#pragma once

#include "hdrdist/image.hpp"

namespace hdrdist {

struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

// Mean SSIM over channels and every window position fully inside the image.
double ssim(const LinearImage& a, const LinearImage& b, const SsimParams& params = {});

// (1 - SSIM) / 2, in [0, 1]. Lower is better.
double dssim(const LinearImage& a, const LinearImage& b, const SsimParams& params = {});

// Evaluation transform: clamp to [0, 1] and apply v^(1 / gamma).
LinearImage gamma_encode(const LinearImage& linear, double gamma);

} // namespace hdrdist
