// NEON variant (AArch64): four adjacent origin pixels per step.

#include "kernels.hpp"

#if defined(__ARM_NEON) && defined(__aarch64__)
#include <arm_neon.h>

#include <algorithm>
#endif

namespace shadowacc::oracle::detail {

#if defined(__ARM_NEON) && defined(__aarch64__)

bool neon_compiled() { return true; }

void count_neon(const KernelArgs& args) {
    constexpr int W = 4;
    const MarchField& field = *args.field;
    const MarchTemplate& tpl = *args.tpl;
    const float* thresholds = tpl.min_height.data();
    const std::ptrdiff_t* offsets = args.offsets;
    const CountTarget& t = args.target;

    const int vec_end = t.col0 + (t.col1 - t.col0) / W * W;
    for (int r = t.row0; r < t.row1; ++r) {
        const std::size_t rlim = row_limit(tpl, field.rows(), r);
        std::uint16_t* out = &(*t.counts)(r - t.row0 + t.out_row0, t.out_col0);
        for (int c = t.col0; c < vec_end; c += W) {
            const int far_lane = tpl.col_step < 0 ? c + W - 1 : c;
            const std::size_t lim = std::min(rlim, col_limit(tpl, field.cols(), far_lane));
            const float* origin = field.at(r, c);
            uint32x4_t hit = vdupq_n_u32(0);
            std::size_t k = 0;
            while (k < lim) {
                const std::size_t block_end = std::min(lim, k + 4);
                for (; k < block_end; ++k) {
                    const float32x4_t h = vld1q_f32(origin + offsets[k]);
                    hit = vorrq_u32(hit, vcgtq_f32(h, vdupq_n_f32(thresholds[k])));
                }
                if (vminvq_u32(hit) != 0) break;
            }
            std::uint16_t* o = out + (c - t.col0);
            o[0] += vgetq_lane_u32(hit, 0) & 1u;
            o[1] += vgetq_lane_u32(hit, 1) & 1u;
            o[2] += vgetq_lane_u32(hit, 2) & 1u;
            o[3] += vgetq_lane_u32(hit, 3) & 1u;
        }
    }
    if (vec_end < t.col1) count_scalar(args, vec_end, t.col1);
}

#else

bool neon_compiled() { return false; }
void count_neon(const KernelArgs& args) { count_scalar(args, args.target.col0, args.target.col1); }

#endif

}  // namespace shadowacc::oracle::detail
