#include "amodelay/fft.hpp"

#include <algorithm>
#include <memory>

#include <fftw3.h>

#include "amodelay/errors.hpp"

namespace amodelay {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::vector<Complex> real_dft(std::span<const double> x, std::size_t n_fft) {
    if (n_fft < x.size() || n_fft == 0) throw ConfigError("FFT length shorter than the input");
    const std::size_t nb = n_fft / 2 + 1;
    std::unique_ptr<double, decltype(&fftw_free)> in(fftw_alloc_real(n_fft), &fftw_free);
    std::unique_ptr<fftw_complex, decltype(&fftw_free)> out(fftw_alloc_complex(nb), &fftw_free);
    // FFTW_ESTIMATE keeps the plan (and hence the rounding) deterministic.
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n_fft), in.get(), out.get(), FFTW_ESTIMATE);
    if (!plan) throw NumericalError("FFTW plan creation failed");
    std::copy(x.begin(), x.end(), in.get());
    std::fill(in.get() + x.size(), in.get() + n_fft, 0.0);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    std::vector<Complex> X(nb);
    for (std::size_t k = 0; k < nb; ++k) X[k] = Complex(out.get()[k][0], out.get()[k][1]);
    return X;
}

}  // namespace amodelay
