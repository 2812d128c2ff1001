#pragma once

// Internal interface between the dispatcher and the per-ISA kernels.

#include <cstddef>
#include <cstdint>

#include "shadowacc/oracle/march.hpp"

namespace shadowacc::oracle::detail {

struct KernelArgs {
    const MarchField* field;
    const MarchTemplate* tpl;
    const std::ptrdiff_t* offsets;  ///< drow * stride + dcol per step
    CountTarget target;
};

/// First step index whose row leaves [0, rows) for an origin in `row`.
std::size_t row_limit(const MarchTemplate& tpl, int rows, int row);
/// First step index whose column leaves [0, cols) for an origin in `col`.
std::size_t col_limit(const MarchTemplate& tpl, int cols, int col);

void count_scalar(const KernelArgs& args, int col_begin, int col_end);

bool avx2_compiled();
void count_avx2(const KernelArgs& args);

bool neon_compiled();
void count_neon(const KernelArgs& args);

}  // namespace shadowacc::oracle::detail
