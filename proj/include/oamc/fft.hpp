#pragma once

#include <complex>
#include <span>

namespace oamc {

// In-place square 2-D FFT on row-major n*n complex data. Plans are created
// once per size behind a lock; execution is reentrant.
class Fft2d {
 public:
  explicit Fft2d(int n);

  int size() const noexcept { return n_; }

  // Unnormalized forward transform, sum_x f(x) exp(-i k.x).
  void forward(std::span<std::complex<double>> data) const;
  // Unnormalized backward transform, sum_k F(k) exp(+i k.x).
  void backward(std::span<std::complex<double>> data) const;
  // Backward transform scaled by 1/n^2 so that inverse(forward(f)) == f.
  void inverse(std::span<std::complex<double>> data) const;

 private:
  int n_;
  void* forward_plan_;
  void* backward_plan_;
};

}  // namespace oamc
