#include "discus/mri/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "discus/core/error.hpp"

namespace discus {
namespace {

// Planner calls are not thread-safe in FFTW; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <class T>
struct Fftw;

template <>
struct Fftw<float> {
  using plan = fftwf_plan;
  using complex = fftwf_complex;
  static plan make(int ny, int nx, int sign) {
    std::vector<std::complex<float>> buf(static_cast<std::size_t>(ny) * nx);
    auto* p = reinterpret_cast<complex*>(buf.data());
    return fftwf_plan_dft_2d(ny, nx, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  static plan make_many(int n, int stride, int sign) {
    std::vector<std::complex<float>> buf(static_cast<std::size_t>(n) * stride);
    auto* p = reinterpret_cast<complex*>(buf.data());
    return fftwf_plan_many_dft(1, &n, stride, p, nullptr, stride, 1, p, nullptr, stride, 1, sign,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  static void run(plan p, std::complex<float>* d) {
    fftwf_execute_dft(p, reinterpret_cast<complex*>(d), reinterpret_cast<complex*>(d));
  }
};

template <>
struct Fftw<double> {
  using plan = fftw_plan;
  using complex = fftw_complex;
  static plan make(int ny, int nx, int sign) {
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(ny) * nx);
    auto* p = reinterpret_cast<complex*>(buf.data());
    return fftw_plan_dft_2d(ny, nx, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  static plan make_many(int n, int stride, int sign) {
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(n) * stride);
    auto* p = reinterpret_cast<complex*>(buf.data());
    return fftw_plan_many_dft(1, &n, stride, p, nullptr, stride, 1, p, nullptr, stride, 1, sign,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  static void run(plan p, std::complex<double>* d) {
    fftw_execute_dft(p, reinterpret_cast<complex*>(d), reinterpret_cast<complex*>(d));
  }
};

template <class T>
typename Fftw<T>::plan plan_2d(int ny, int nx, int sign) {
  static std::map<std::tuple<int, int, int>, typename Fftw<T>::plan> cache;
  std::lock_guard lock(planner_mutex());
  auto key = std::make_tuple(ny, nx, sign);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, Fftw<T>::make(ny, nx, sign)).first;
  return it->second;
}

// Moves the array centre to index 0 (ifftshift) or back (fftshift).
template <class T>
void shift2(std::span<std::complex<T>> d, int ny, int nx, bool to_origin, std::vector<std::complex<T>>& tmp) {
  tmp.assign(d.begin(), d.end());
  const int sy = to_origin ? ny - ny / 2 : ny / 2;
  const int sx = to_origin ? nx - nx / 2 : nx / 2;
  for (int y = 0; y < ny; ++y) {
    const int yd = (y + sy) % ny;
    for (int x = 0; x < nx; ++x) d[static_cast<std::size_t>(yd) * nx + (x + sx) % nx] = tmp[static_cast<std::size_t>(y) * nx + x];
  }
}

template <class T>
void centred(std::span<std::complex<T>> d, int ny, int nx, int sign) {
  if (ny < 1 || nx < 1 || d.size() != static_cast<std::size_t>(ny) * nx)
    throw DimensionError("fft2c: buffer does not match (ny, nx)");
  thread_local std::vector<std::complex<T>> tmp;
  shift2(d, ny, nx, true, tmp);
  Fftw<T>::run(plan_2d<T>(ny, nx, sign), d.data());
  shift2(d, ny, nx, false, tmp);
  const T s = T(1) / std::sqrt(static_cast<T>(ny) * nx);
  for (auto& v : d) v *= s;
}

}  // namespace

void fft2c(std::span<std::complex<float>> d, int ny, int nx) { centred(d, ny, nx, FFTW_FORWARD); }
void ifft2c(std::span<std::complex<float>> d, int ny, int nx) { centred(d, ny, nx, FFTW_BACKWARD); }
void fft2c(std::span<std::complex<double>> d, int ny, int nx) { centred(d, ny, nx, FFTW_FORWARD); }
void ifft2c(std::span<std::complex<double>> d, int ny, int nx) { centred(d, ny, nx, FFTW_BACKWARD); }

namespace {

template <class T>
void axis0(std::span<std::complex<T>> d, int n, int stride, bool inverse) {
  if (n < 1 || stride < 1 || d.size() != static_cast<std::size_t>(n) * stride)
    throw DimensionError("fft_axis0: buffer does not match (n, stride)");
  static std::map<std::tuple<int, int, int>, typename Fftw<T>::plan> cache;
  const int sign = inverse ? FFTW_BACKWARD : FFTW_FORWARD;
  typename Fftw<T>::plan p;
  {
    std::lock_guard lock(planner_mutex());
    auto key = std::make_tuple(n, stride, sign);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, Fftw<T>::make_many(n, stride, sign)).first;
    p = it->second;
  }
  Fftw<T>::run(p, d.data());
  const T s = T(1) / std::sqrt(static_cast<T>(n));
  for (auto& v : d) v *= s;
}

}  // namespace

void fft_axis0(std::span<std::complex<float>> d, int n, int stride, bool inverse) { axis0(d, n, stride, inverse); }
void fft_axis0(std::span<std::complex<double>> d, int n, int stride, bool inverse) { axis0(d, n, stride, inverse); }

}  // namespace discus
