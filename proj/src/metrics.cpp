#include "dsfl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dsfl {

namespace {

constexpr int kMsSsimWindow = 4;
constexpr double kScaleWeights[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

void check_same_shape(const Image& a, const Image& b) {
    if (a.side != b.side || a.px.size() != b.px.size())
        throw std::invalid_argument("image shape mismatch");
    if (a.side <= 0) throw std::invalid_argument("empty image");
}

struct WindowMoments {
    double mean_cs = 0.0;   // mean contrast/structure term over windows
    double mean_lum = 0.0;  // mean luminance term over windows
};

// Uniform windows, stride 1. Negative contrast/structure terms are floored
// at 0 so multi-scale products stay in range.
WindowMoments window_pass(const Image& a, const Image& b, int win, double max_val,
                          bool clamp_cs) {
    const double c1 = (0.01 * max_val) * (0.01 * max_val);
    const double c2 = (0.03 * max_val) * (0.03 * max_val);
    const int side = a.side;
    const int n_win = side - win + 1;
    const double inv = 1.0 / (win * win);

    double sum_cs = 0.0, sum_lum = 0.0;
    for (int r = 0; r < n_win; ++r) {
        for (int c = 0; c < n_win; ++c) {
            double ma = 0.0, mb = 0.0;
            for (int i = 0; i < win; ++i)
                for (int j = 0; j < win; ++j) {
                    ma += a.at(r + i, c + j);
                    mb += b.at(r + i, c + j);
                }
            ma *= inv;
            mb *= inv;
            double va = 0.0, vb = 0.0, cov = 0.0;
            for (int i = 0; i < win; ++i)
                for (int j = 0; j < win; ++j) {
                    double da = a.at(r + i, c + j) - ma;
                    double db = b.at(r + i, c + j) - mb;
                    va += da * da;
                    vb += db * db;
                    cov += da * db;
                }
            va *= inv;
            vb *= inv;
            cov *= inv;
            double cs = (2.0 * cov + c2) / (va + vb + c2);
            if (clamp_cs && cs < 0.0) cs = 0.0;
            sum_cs += cs;
            sum_lum += (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
        }
    }
    WindowMoments m;
    m.mean_cs = sum_cs / (n_win * n_win);
    m.mean_lum = sum_lum / (n_win * n_win);
    return m;
}

Image mean_pool_2x(const Image& img) {
    Image out;
    out.side = img.side / 2;
    out.px.resize(static_cast<std::size_t>(out.side) * out.side);
    for (int r = 0; r < out.side; ++r)
        for (int c = 0; c < out.side; ++c)
            out.at(r, c) = 0.25 * (img.at(2 * r, 2 * c) + img.at(2 * r, 2 * c + 1) +
                                   img.at(2 * r + 1, 2 * c) + img.at(2 * r + 1, 2 * c + 1));
    return out;
}

}  // namespace

double psnr(const Image& a, const Image& b, double max_val) {
    check_same_shape(a, b);
    if (max_val <= 0.0) throw std::invalid_argument("psnr: max_val must be positive");
    double mse = 0.0;
    for (std::size_t i = 0; i < a.px.size(); ++i) {
        double d = a.px[i] - b.px[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.px.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(max_val * max_val / mse);
}

double ssim(const Image& a, const Image& b, const SsimParams& p) {
    check_same_shape(a, b);
    if (a.side < p.window) throw std::invalid_argument("ssim: image smaller than window");
    const double c1 = (0.01 * p.max_val) * (0.01 * p.max_val);
    const double c2 = (0.03 * p.max_val) * (0.03 * p.max_val);
    const int win = p.window;
    const int n_win = a.side - win + 1;
    const double inv = 1.0 / (win * win);

    double sum = 0.0;
    for (int r = 0; r < n_win; ++r) {
        for (int c = 0; c < n_win; ++c) {
            double ma = 0.0, mb = 0.0;
            for (int i = 0; i < win; ++i)
                for (int j = 0; j < win; ++j) {
                    ma += a.at(r + i, c + j);
                    mb += b.at(r + i, c + j);
                }
            ma *= inv;
            mb *= inv;
            double va = 0.0, vb = 0.0, cov = 0.0;
            for (int i = 0; i < win; ++i)
                for (int j = 0; j < win; ++j) {
                    double da = a.at(r + i, c + j) - ma;
                    double db = b.at(r + i, c + j) - mb;
                    va += da * da;
                    vb += db * db;
                    cov += da * db;
                }
            va *= inv;
            vb *= inv;
            cov *= inv;
            sum += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
                   ((ma * ma + mb * mb + c1) * (va + vb + c2));
        }
    }
    return sum / (n_win * n_win);
}

int max_feasible_scales(int side) {
    int s = 0;
    while (side >= kMsSsimWindow) {
        ++s;
        side /= 2;
    }
    return std::min(s, 5);
}

double ms_ssim_at(const Image& a, const Image& b, int scales, double max_val) {
    check_same_shape(a, b);
    if (scales < 1) throw std::invalid_argument("ms_ssim: scales must be >= 1");
    const int feasible = max_feasible_scales(a.side);
    if (scales > feasible)
        throw std::invalid_argument("ms_ssim: image too small for " + std::to_string(scales) +
                                    " scales (max feasible: " + std::to_string(feasible) + ")");

    double wsum = 0.0;
    for (int s = 0; s < scales; ++s) wsum += kScaleWeights[s];

    Image cur_a = a, cur_b = b;
    double result = 1.0;
    for (int s = 0; s < scales; ++s) {
        WindowMoments m = window_pass(cur_a, cur_b, kMsSsimWindow, max_val, true);
        double w = kScaleWeights[s] / wsum;
        result *= std::pow(m.mean_cs, w);
        if (s == scales - 1) result *= std::pow(std::max(m.mean_lum, 0.0), w);
        if (s + 1 < scales) {
            cur_a = mean_pool_2x(cur_a);
            cur_b = mean_pool_2x(cur_b);
        }
    }
    return result;
}

double ms_ssim(const Image& a, const Image& b, double max_val) {
    check_same_shape(a, b);
    int scales = std::min(3, max_feasible_scales(a.side));
    if (scales < 1) throw std::invalid_argument("ms_ssim: image smaller than window");
    return ms_ssim_at(a, b, scales, max_val);
}

double accuracy(const std::vector<int>& predictions, const std::vector<int>& truth) {
    if (predictions.size() != truth.size())
        throw std::invalid_argument("accuracy: length mismatch");
    if (predictions.empty()) throw std::invalid_argument("accuracy: empty input");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
        if (predictions[i] == truth[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw std::invalid_argument("tv_distance: support mismatch");
    double sp = 0.0, sq = 0.0;
    for (double x : p) sp += x;
    for (double x : q) sq += x;
    if (std::fabs(sp - 1.0) > 1e-9 || std::fabs(sq - 1.0) > 1e-9)
        throw std::invalid_argument("tv_distance: inputs must sum to 1");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
    return 0.5 * s;
}

}  // namespace dsfl
