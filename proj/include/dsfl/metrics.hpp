#pragma once

#include <vector>

#include "dsfl/types.hpp"

namespace dsfl {

// All image-quality constants in one place.
//
//   ssim window      8x8, uniform, stride 1
//   ms-ssim window   4x4, uniform, stride 1 (coarsest level of a 16x16
//                    image at 3 scales is 4x4, so the window must fit it)
//   stability       C1 = (0.01 L)^2, C2 = (0.03 L)^2
//   ms-ssim scales   auto: min(5, floor(log2(side / 4)) + 1); 3 at 16x16
//   scale weights    {0.0448, 0.2856, 0.3001, 0.2363, 0.1333}, renormalized
//                    over the scales in use; luminance applies at the
//                    coarsest scale only
//   downsampling     2x2 mean pooling between scales
//   negative terms   contrast/structure terms are floored at 0 so the
//                    multi-scale product stays in [0, 1]
struct SsimParams {
    double max_val = 1.0;
    int window = 8;
};

// 10*log10(max^2 / MSE); identical images give +infinity (written as
// "inf" in CSV output, never a capped number).
double psnr(const Image& a, const Image& b, double max_val);

double ssim(const Image& a, const Image& b, const SsimParams& p = {});

// Auto-selects the scale count for the image side.
double ms_ssim(const Image& a, const Image& b, double max_val = 1.0);
// Errors if the coarsest level cannot fit the window, naming the maximum
// feasible scale count.
double ms_ssim_at(const Image& a, const Image& b, int scales, double max_val = 1.0);

int max_feasible_scales(int side);

double accuracy(const std::vector<int>& predictions, const std::vector<int>& truth);

// 0.5 * sum |p_i - q_i| over distributions of equal support.
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace dsfl
