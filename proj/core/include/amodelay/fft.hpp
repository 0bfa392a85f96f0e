#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "amodelay/types.hpp"

namespace amodelay {

/// Smallest power of two >= n (n >= 1).
std::size_t next_pow2(std::size_t n);

/// DFT of a real sequence, zero-padded to `n_fft` (>= x.size()). Returns the
/// n_fft/2 + 1 non-negative frequency bins, X_k = sum_j x_j e^{-2 pi i jk/n}.
std::vector<Complex> real_dft(std::span<const double> x, std::size_t n_fft);

}  // namespace amodelay
