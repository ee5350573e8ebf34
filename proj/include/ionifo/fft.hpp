#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <vector>

#include "ionifo/errors.hpp"

// In-place iterative radix-2 FFT with cached twiddle/bit-reversal tables.
// Deterministic, no external dependencies; sizes must be powers of two.
// Forward uses e^{-2 pi i j k / n}; inverse includes the 1/n factor.

namespace ionifo::fft {

namespace detail {

struct Plan {
  std::size_t n = 0;
  std::vector<std::size_t> bitrev;
  std::vector<std::complex<double>> twiddle;  // e^{-2 pi i k / n}, k < n/2
};

inline Plan make_plan(std::size_t n) {
  Plan p;
  p.n = n;
  p.bitrev.resize(n);
  std::size_t log2n = 0;
  while ((std::size_t{1} << log2n) < n) ++log2n;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rev = 0;
    for (std::size_t b = 0; b < log2n; ++b) {
      if (i & (std::size_t{1} << b)) rev |= std::size_t{1} << (log2n - 1 - b);
    }
    p.bitrev[i] = rev;
  }
  p.twiddle.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / n;
    p.twiddle[k] = {std::cos(angle), std::sin(angle)};
  }
  return p;
}

inline const Plan& plan(std::size_t n) {
  if (n == 0 || (n & (n - 1)) != 0) {
    throw domain_error("fft: size must be a power of two");
  }
  thread_local std::map<std::size_t, Plan> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_plan(n)).first;
  return it->second;
}

template <bool Inverse>
void transform(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  const Plan& p = plan(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < p.bitrev[i]) std::swap(a[i], a[p.bitrev[i]]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        std::complex<double> w = p.twiddle[k * stride];
        if constexpr (Inverse) w = std::conj(w);
        const std::complex<double> t = w * a[start + k + half];
        const std::complex<double> u = a[start + k];
        a[start + k] = u + t;
        a[start + k + half] = u - t;
      }
    }
  }
  if constexpr (Inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : a) v *= scale;
  }
}

}  // namespace detail

inline void forward(std::vector<std::complex<double>>& a) {
  detail::transform<false>(a);
}

inline void inverse(std::vector<std::complex<double>>& a) {
  detail::transform<true>(a);
}

}  // namespace ionifo::fft
