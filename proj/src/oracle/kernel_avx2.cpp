// AVX2 variant: eight horizontally adjacent origin pixels share each
// template step, so every step is one unaligned load and one compare.

#include "kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>

#include <algorithm>
#endif

namespace shadowacc::oracle::detail {

#if defined(__AVX2__)

bool avx2_compiled() { return true; }

void count_avx2(const KernelArgs& args) {
    constexpr int W = 8;
    static_assert(W <= MarchField::kLaneMargin);
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
            // The lane that leaves the field last bounds the walk; lanes that
            // left earlier read the zero margin.
            const int far_lane = tpl.col_step < 0 ? c + W - 1 : c;
            const std::size_t lim = std::min(rlim, col_limit(tpl, field.cols(), far_lane));
            const float* origin = field.at(r, c);
            __m256 hit = _mm256_setzero_ps();
            std::size_t k = 0;
            while (k < lim) {
                const std::size_t block_end = std::min(lim, k + 4);
                for (; k < block_end; ++k) {
                    const __m256 h = _mm256_loadu_ps(origin + offsets[k]);
                    hit = _mm256_or_ps(hit, _mm256_cmp_ps(h, _mm256_set1_ps(thresholds[k]), _CMP_GT_OQ));
                }
                if (_mm256_movemask_ps(hit) == 0xFF) break;
            }
            const unsigned mask = static_cast<unsigned>(_mm256_movemask_ps(hit));
            std::uint16_t* o = out + (c - t.col0);
            for (int lane = 0; lane < W; ++lane) o[lane] += (mask >> lane) & 1u;
        }
    }
    if (vec_end < t.col1) count_scalar(args, vec_end, t.col1);
}

#else

bool avx2_compiled() { return false; }
void count_avx2(const KernelArgs& args) { count_scalar(args, args.target.col0, args.target.col1); }

#endif

}  // namespace shadowacc::oracle::detail
