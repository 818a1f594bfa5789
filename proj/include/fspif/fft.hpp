#pragma once

#include <mutex>
#include <vector>

#include "fspif/types.hpp"

namespace fspif {

// FFTW's planner is not thread safe; every plan creation takes this lock.
std::mutex& fftw_planner_mutex();

// In-place n x n DFT with centered indices on both sides:
//   out[m] = sum_k in[k] exp(sign * 2 pi i k.m / n),  k, m in [-n/2, n/2)^2,
// stored row-major with index 0 <-> -n/2. n must be even; sign is +1 or -1.
void centered_dft2(std::vector<Complex>& data, int n, int sign);

}  // namespace fspif
