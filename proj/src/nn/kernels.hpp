#pragma once

// Dense kernels shared by training and inference.
//
// gemm_nn gives every output row the same instruction sequence no matter how
// many rows the call covers (tail rows go through a zero-padded block), so a
// row's result never depends on its batch.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstring>
#include <vector>

namespace hypernp::nn::kernels {

inline constexpr std::size_t kRowBlock = 4;

template <typename T>
inline constexpr std::size_t kColBlock = 128 / sizeof(T);

// c[R x n] = a[R x k] * b[k x n]; a has row stride lda, c has row stride ldc.
template <typename T>
inline void gemm_row_block(const T* a, std::size_t lda, const T* b, T* c, std::size_t ldc,
                           std::size_t k, std::size_t n) {
  constexpr std::size_t R = kRowBlock;
  constexpr std::size_t J = kColBlock<T>;
  std::size_t j0 = 0;
  for (; j0 + J <= n; j0 += J) {
    T acc[R][J] = {};
    for (std::size_t p = 0; p < k; ++p) {
      const T* brow = b + p * n + j0;
      for (std::size_t r = 0; r < R; ++r) {
        const T av = a[r * lda + p];
        for (std::size_t j = 0; j < J; ++j) acc[r][j] += av * brow[j];
      }
    }
    for (std::size_t r = 0; r < R; ++r) std::memcpy(c + r * ldc + j0, acc[r], sizeof(T) * J);
  }
  if (j0 < n) {
    const std::size_t w = n - j0;
    T acc[R][J] = {};
    for (std::size_t p = 0; p < k; ++p) {
      const T* brow = b + p * n + j0;
      for (std::size_t r = 0; r < R; ++r) {
        const T av = a[r * lda + p];
        for (std::size_t j = 0; j < w; ++j) acc[r][j] += av * brow[j];
      }
    }
    for (std::size_t r = 0; r < R; ++r) std::memcpy(c + r * ldc + j0, acc[r], sizeof(T) * w);
  }
}

// c[m x n] = a[m x k] * b[k x n]
template <typename T>
void gemm_nn(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
  constexpr std::size_t R = kRowBlock;
  std::size_t i = 0;
  for (; i + R <= m; i += R) gemm_row_block(a + i * k, k, b, c + i * n, n, k, n);
  if (i < m) {
    const std::size_t rows = m - i;
    std::vector<T> pad_a(R * k, T{});
    std::vector<T> pad_c(R * n, T{});
    std::memcpy(pad_a.data(), a + i * k, sizeof(T) * rows * k);
    gemm_row_block(pad_a.data(), k, b, pad_c.data(), n, k, n);
    std::memcpy(c + i * n, pad_c.data(), sizeof(T) * rows * n);
  }
}

// c[k x n] = a^T * b with a[m x k], b[m x n]
template <typename T>
void gemm_tn(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
  std::fill(c, c + k * n, T{});
  for (std::size_t i = 0; i < m; ++i) {
    const T* brow = b + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = a[i * k + p];
      if (av == T{}) continue;
      T* crow = c + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// c[m x k] = a * b^T with a[m x n], b[k x n]
template <typename T>
void gemm_nt(const T* a, const T* b, T* c, std::size_t m, std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    const T* arow = a + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T* brow = b + p * n;
      T sum{};
      for (std::size_t j = 0; j < n; ++j) sum += arow[j] * brow[j];
      c[i * k + p] = sum;
    }
  }
}

}  // namespace hypernp::nn::kernels
