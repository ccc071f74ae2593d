// Continuum-normalized transforms on the periodic grid, backed by FFTW.
//   fhat(xi_k) = h^n sum_j f(x_j) e^{-2 pi i x_j . xi_k}
//   f(x_j)     = L^{-n} sum_k fhat(xi_k) e^{2 pi i x_j . xi_k}
#pragma once

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "fl/grid.hpp"

namespace fl {

namespace detail {

// Plans are created once per (n, N, direction) and executed on caller arrays
// through the new-array interface, which FFTW documents as thread safe.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n, int N, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_tuple(n, N, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::size_t len = (n == 1) ? std::size_t(N) : std::size_t(N) * N;
    fftw_complex* buf = fftw_alloc_complex(len);
    fftw_plan p = (n == 1)
                      ? fftw_plan_dft_1d(N, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
                      : fftw_plan_dft_2d(N, N, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plans_.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

// In-place unnormalized DFT of a raw buffer of spec.size() samples.
inline void dft_inplace(const GridSpec& spec, cplx* data, int sign) {
  fftw_plan p = PlanCache::instance().get(spec.n, spec.N, sign);
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, d, d);
}

}  // namespace detail

// Raw-buffer versions used by the bilinear kernel to avoid reallocations.
inline void fourier_inplace(const GridSpec& spec, cplx* data) {
  detail::dft_inplace(spec, data, FFTW_FORWARD);
  const double c = spec.cell();
  for (std::size_t i = 0; i < spec.size(); ++i) data[i] *= c * spec.centring_sign(i);
}

inline void inverse_inplace(const GridSpec& spec, cplx* data) {
  for (std::size_t i = 0; i < spec.size(); ++i) data[i] *= spec.centring_sign(i);
  detail::dft_inplace(spec, data, FFTW_BACKWARD);
  const double c = 1.0 / spec.volume();
  for (std::size_t i = 0; i < spec.size(); ++i) data[i] *= c;
}

inline GridFunction fourier(const GridFunction& f) {
  f.require(Domain::space, "fourier");
  GridFunction out(f.spec, f.values, Domain::frequency);
  fourier_inplace(out.spec, out.values.data());
  return out;
}

inline GridFunction inverse(const GridFunction& fh) {
  fh.require(Domain::frequency, "inverse");
  GridFunction out(fh.spec, fh.values, Domain::space);
  inverse_inplace(out.spec, out.values.data());
  return out;
}

}  // namespace fl
