#include "oamc/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oamc {
namespace {

struct PlanPair {
  fftw_plan forward;
  fftw_plan backward;
};

// Plans live for the process lifetime; FFTW's planner is not thread-safe
// but fftw_execute_dft on a finished plan is.
PlanPair plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  std::vector<fftw_complex> scratch(static_cast<std::size_t>(n) * n);
  PlanPair pair{
      fftw_plan_dft_2d(n, n, scratch.data(), scratch.data(), FFTW_FORWARD,
                       FFTW_ESTIMATE | FFTW_UNALIGNED),
      fftw_plan_dft_2d(n, n, scratch.data(), scratch.data(), FFTW_BACKWARD,
                       FFTW_ESTIMATE | FFTW_UNALIGNED)};
  if (!pair.forward || !pair.backward) throw std::runtime_error("FFTW planning failed");
  cache.emplace(n, pair);
  return pair;
}

void execute(void* plan, std::span<std::complex<double>> data, int n) {
  if (data.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("FFT buffer size does not match plan");
  auto* raw = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan), raw, raw);
}

}  // namespace

Fft2d::Fft2d(int n) : n_(n) {
  if (n <= 0) throw std::invalid_argument("FFT size must be positive");
  auto pair = plans_for(n);
  forward_plan_ = pair.forward;
  backward_plan_ = pair.backward;
}

void Fft2d::forward(std::span<std::complex<double>> data) const {
  execute(forward_plan_, data, n_);
}

void Fft2d::backward(std::span<std::complex<double>> data) const {
  execute(backward_plan_, data, n_);
}

void Fft2d::inverse(std::span<std::complex<double>> data) const {
  backward(data);
  const double scale = 1.0 / (static_cast<double>(n_) * n_);
  for (auto& v : data) v *= scale;
}

}  // namespace oamc
