#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <utility>

namespace seabed::fft {
namespace {

struct BufferDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using Buffer = std::unique_ptr<T[], BufferDeleter>;

template <typename T>
Buffer<T> allocate(std::size_t n) {
  return Buffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1))));
}

enum class Kind { dct1, r2c, c2r };

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Plans are never destroyed; the cache is bounded by the handful of sizes a
// run uses.
fftw_plan cached_plan(Kind kind, int n) {
  static std::map<std::pair<Kind, int>, fftw_plan> cache;
  std::lock_guard lock(planner_mutex());
  auto key = std::make_pair(kind, n);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  fftw_plan plan = nullptr;
  switch (kind) {
    case Kind::dct1: {
      auto in = allocate<double>(n);
      auto out = allocate<double>(n);
      plan = fftw_plan_r2r_1d(n, in.get(), out.get(), FFTW_REDFT00, FFTW_ESTIMATE);
      break;
    }
    case Kind::r2c: {
      auto in = allocate<double>(n);
      auto out = allocate<fftw_complex>(n / 2 + 1);
      plan = fftw_plan_dft_r2c_1d(n, in.get(), out.get(), FFTW_ESTIMATE);
      break;
    }
    case Kind::c2r: {
      auto in = allocate<fftw_complex>(n / 2 + 1);
      auto out = allocate<double>(n);
      plan = fftw_plan_dft_c2r_1d(n, in.get(), out.get(), FFTW_ESTIMATE);
      break;
    }
  }
  cache.emplace(key, plan);
  return plan;
}

std::vector<std::complex<double>> forward_real(std::span<const double> x, int n) {
  auto in = allocate<double>(n);
  auto out = allocate<fftw_complex>(n / 2 + 1);
  std::fill(in.get(), in.get() + n, 0.0);
  std::copy(x.begin(), x.end(), in.get());
  fftw_execute_dft_r2c(cached_plan(Kind::r2c, n), in.get(), out.get());
  std::vector<std::complex<double>> spec(n / 2 + 1);
  for (int k = 0; k < n / 2 + 1; ++k) spec[k] = {out[k][0], out[k][1]};
  return spec;
}

std::vector<double> inverse_real(std::span<const std::complex<double>> spec, int n) {
  auto in = allocate<fftw_complex>(n / 2 + 1);
  auto out = allocate<double>(n);
  for (int k = 0; k < n / 2 + 1; ++k) {
    in[k][0] = spec[k].real();
    in[k][1] = spec[k].imag();
  }
  fftw_execute_dft_c2r(cached_plan(Kind::c2r, n), in.get(), out.get());
  std::vector<double> result(out.get(), out.get() + n);
  for (double& v : result) v /= n;
  return result;
}

}  // namespace

std::vector<double> dct1(std::span<const double> in) {
  const int n = static_cast<int>(in.size());
  auto buf_in = allocate<double>(n);
  auto buf_out = allocate<double>(n);
  std::copy(in.begin(), in.end(), buf_in.get());
  fftw_execute_r2r(cached_plan(Kind::dct1, n), buf_in.get(), buf_out.get());
  return {buf_out.get(), buf_out.get() + n};
}

std::vector<double> circular_convolve(std::span<const double> a,
                                      std::span<const double> b) {
  const int n = static_cast<int>(a.size());
  auto fa = forward_real(a, n);
  auto fb = forward_real(b, n);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  return inverse_real(fa, n);
}

std::vector<double> autocovariance(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  std::vector<double> centered(x.begin(), x.end());
  for (double& v : centered) v -= mean;

  int padded = 1;
  while (padded < 2 * n) padded *= 2;
  auto spec = forward_real(centered, padded);
  for (auto& c : spec) c = std::norm(c);
  auto acov = inverse_real(spec, padded);
  acov.resize(n);
  for (double& v : acov) v /= n;
  return acov;
}

}  // namespace seabed::fft
