#include "hdrdist/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "hdrdist/error.hpp"

namespace hdrdist {
namespace {

std::vector<double> gaussian_taps(int window, double sigma) {
    std::vector<double> taps(static_cast<std::size_t>(window));
    const double centre = (window - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < window; ++i) {
        const double d = i - centre;
        taps[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
        sum += taps[static_cast<std::size_t>(i)];
    }
    for (double& t : taps) t /= sum;
    return taps;
}

} // namespace

double ssim(const LinearImage& a, const LinearImage& b, const SsimParams& params) {
    if (!a.same_shape(b)) fail(ErrorCode::SizeMismatch, "SSIM inputs differ in shape");
    const auto window = static_cast<std::size_t>(params.window);
    if (params.window < 1 || a.width() < window || a.height() < window) {
        fail(ErrorCode::InvalidArgument, "image is smaller than the SSIM window");
    }
    const std::vector<double> taps = gaussian_taps(params.window, params.sigma);
    const double c1 = (params.k1 * params.dynamic_range) * (params.k1 * params.dynamic_range);
    const double c2 = (params.k2 * params.dynamic_range) * (params.k2 * params.dynamic_range);

    const std::size_t out_w = a.width() - window + 1;
    const std::size_t out_h = a.height() - window + 1;

    // Moments: a, b, a*a, b*b, a*b. Horizontal pass into `rows`, vertical pass per output.
    constexpr std::size_t kMoments = 5;
    std::vector<std::array<double, kMoments>> rows(a.height() * out_w);
    double total = 0.0;
    for (std::size_t c = 0; c < a.channels(); ++c) {
        for (std::size_t y = 0; y < a.height(); ++y) {
            for (std::size_t x = 0; x < out_w; ++x) {
                std::array<double, kMoments> acc{};
                for (std::size_t k = 0; k < window; ++k) {
                    const double va = a.at(x + k, y, c);
                    const double vb = b.at(x + k, y, c);
                    const double w = taps[k];
                    acc[0] += w * va;
                    acc[1] += w * vb;
                    acc[2] += w * (va * va);
                    acc[3] += w * (vb * vb);
                    acc[4] += w * (va * vb);
                }
                rows[y * out_w + x] = acc;
            }
        }
        for (std::size_t y = 0; y < out_h; ++y) {
            for (std::size_t x = 0; x < out_w; ++x) {
                std::array<double, kMoments> m{};
                for (std::size_t k = 0; k < window; ++k) {
                    const auto& r = rows[(y + k) * out_w + x];
                    for (std::size_t i = 0; i < kMoments; ++i) m[i] += taps[k] * r[i];
                }
                const double mu_a = m[0];
                const double mu_b = m[1];
                const double var_a = m[2] - mu_a * mu_a;
                const double var_b = m[3] - mu_b * mu_b;
                const double cov = m[4] - mu_a * mu_b;
                const double num = (2.0 * (mu_a * mu_b) + c1) * (2.0 * cov + c2);
                const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
                total += num / den;
            }
        }
    }
    return total / static_cast<double>(out_w * out_h * a.channels());
}

double dssim(const LinearImage& a, const LinearImage& b, const SsimParams& params) {
    return std::clamp((1.0 - ssim(a, b, params)) / 2.0, 0.0, 1.0);
}

LinearImage gamma_encode(const LinearImage& linear, double gamma) {
    if (!(gamma > 0.0)) fail(ErrorCode::InvalidArgument, "gamma must be > 0");
    LinearImage out(linear.width(), linear.height(), linear.channels());
    auto src = linear.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (!std::isfinite(src[i])) fail(ErrorCode::NonFiniteInput, "cannot encode a non-finite sample");
        dst[i] = std::pow(std::clamp(src[i], 0.0, 1.0), 1.0 / gamma);
    }
    return out;
}

} // namespace hdrdist
