#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace bcg::detail {
namespace {

// FFTW planning is not thread-safe; plans are cached per (size, sign) and
// executed with the new-array interface, which is safe concurrently.
std::mutex g_planner_mutex;
std::map<std::pair<size_t, int>, fftw_plan>& plan_cache() {
  static std::map<std::pair<size_t, int>, fftw_plan> cache;
  return cache;
}

fftw_plan plan_for(size_t n, int sign) {
  std::lock_guard<std::mutex> lock(g_planner_mutex);
  auto key = std::make_pair(n, sign);
  auto it = plan_cache().find(key);
  if (it != plan_cache().end()) return it->second;
  std::vector<std::complex<double>> dummy(n);
  auto* buf = reinterpret_cast<fftw_complex*>(dummy.data());
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan == nullptr) throw std::runtime_error("fftw planning failed");
  plan_cache().emplace(key, plan);
  return plan;
}

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

void fft(std::vector<std::complex<double>>& data, int sign) {
  if (data.empty()) return;
  fftw_plan plan = plan_for(data.size(), sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

std::vector<std::complex<double>> correlate_valid(const std::vector<double>& x,
                                                  const std::vector<std::complex<double>>& g) {
  const size_t nx = x.size();
  const size_t ng = g.size();
  if (nx < ng || ng == 0) throw std::invalid_argument("correlate_valid: nx < ng");
  const size_t nout = nx - ng + 1;
  const size_t m = next_pow2(nx + ng);

  std::vector<std::complex<double>> fx(m), fg(m);
  for (size_t i = 0; i < nx; ++i) fx[i] = x[i];
  // correlation == convolution with the reversed kernel
  for (size_t i = 0; i < ng; ++i) fg[i] = g[ng - 1 - i];
  fft(fx, -1);
  fft(fg, -1);
  for (size_t i = 0; i < m; ++i) fx[i] *= fg[i];
  fft(fx, +1);
  const double scale = 1.0 / static_cast<double>(m);
  std::vector<std::complex<double>> out(nout);
  for (size_t i = 0; i < nout; ++i) out[i] = fx[ng - 1 + i] * scale;
  return out;
}

}  // namespace bcg::detail
