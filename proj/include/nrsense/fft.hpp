// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nrsense/common.hpp"

namespace nrs {

// Iterative radix-2 FFT for power-of-two sizes. Unscaled:
//   forward:  X[k] = sum_n x[n] exp(-j 2 pi n k / N)
//   inverse:  x[n] = sum_k X[k] exp(+j 2 pi n k / N)
class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n) {
    if (n == 0 || (n & (n - 1)) != 0)
      throw std::invalid_argument("Fft: size must be a power of two");
    tw_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double a = -2.0 * kPi * double(k) / double(n);
      tw_[k] = {std::cos(a), std::sin(a)};
    }
    rev_.resize(n);
    std::size_t bits = 0;
    while ((std::size_t(1) << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b)
        if (i & (std::size_t(1) << b)) r |= std::size_t(1) << (bits - 1 - b);
      rev_[i] = r;
    }
  }

  std::size_t size() const { return n_; }

  void forward(cd* x) const { transform(x, false); }
  void inverse(cd* x) const { transform(x, true); }

 private:
  void transform(cd* x, bool inv) const {
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t j = rev_[i];
      if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t step = n_ / len;
      for (std::size_t i = 0; i < n_; i += len) {
        for (std::size_t k = 0; k < len / 2; ++k) {
          cd w = tw_[k * step];
          if (inv) w = std::conj(w);
          const cd u = x[i + k];
          const cd v = x[i + k + len / 2] * w;
          x[i + k] = u + v;
          x[i + k + len / 2] = u - v;
        }
      }
    }
  }

  std::size_t n_;
  std::vector<cd> tw_;
  std::vector<std::size_t> rev_;
};

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace nrs
