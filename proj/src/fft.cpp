#include "fspif/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <memory>

namespace fspif {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

namespace {

// (-1)^(i+j) turns the shifted DFT into a standard one when n is even; the
// constant phase (-1)^(n/2) appears once per dimension and cancels in 2D.
void checkerboard(std::vector<Complex>& data, int n) {
  for (int i = 0; i < n; ++i) {
    Complex* row = data.data() + static_cast<std::size_t>(i) * n;
    for (int j = (i % 2 == 0) ? 1 : 0; j < n; j += 2) row[j] = -row[j];
  }
}

}  // namespace

void centered_dft2(std::vector<Complex>& data, int n, int sign) {
  if (n <= 0 || n % 2 != 0) throw InputError("centered_dft2 needs an even size");
  const std::size_t count = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  if (data.size() != count) throw InputError("centered_dft2: array does not match size");

  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * count));
  if (buf == nullptr) throw std::bad_alloc();
  std::unique_ptr<fftw_complex, decltype(&fftw_free)> guard(buf, &fftw_free);

  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_2d(n, n, buf, buf, sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
  }
  checkerboard(data, n);
  std::memcpy(buf, data.data(), sizeof(fftw_complex) * count);
  fftw_execute(plan);
  std::memcpy(static_cast<void*>(data.data()), buf, sizeof(fftw_complex) * count);
  checkerboard(data, n);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
}

}  // namespace fspif
