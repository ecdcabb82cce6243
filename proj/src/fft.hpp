#pragma once

#include "halfwave/spectral_grid.hpp"

namespace halfwave::detail {

// Unitary in-place 2D DFT of an n x n row-major array. The pointer must come
// from an AlignedAllocator buffer.
void fft_forward(Complex* data, int n);
void fft_inverse(Complex* data, int n);

}  // namespace halfwave::detail
