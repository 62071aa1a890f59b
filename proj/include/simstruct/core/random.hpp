#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "simstruct/core/tensor.hpp"

namespace simstruct {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of stream `path` below `base`; e.g. stream_seed(base, {bin, trial}).
/// Streams are a pure function of their path, so parallel execution order
/// never changes which numbers a trial sees.
constexpr std::uint64_t stream_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(base);
  for (std::uint64_t p : path) s = mix64(s ^ mix64(p + 0x632BE59BD9B4E019ULL));
  return s;
}

constexpr std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index) {
  return stream_seed(base, {index});
}

/// Standard real normal, or CN(0,1) (real and imaginary parts N(0,1/2)).
template <class Scalar>
Scalar standard_normal(Rng& rng, std::normal_distribution<double>& n) {
  if constexpr (is_complex_v<Scalar>) {
    const double re = n(rng);
    const double im = n(rng);
    return Scalar(re, im) * std::sqrt(0.5);
  } else {
    return n(rng);
  }
}

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gaussian_vector(Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(n);
  for (Index i = 0; i < n; ++i) v[i] = standard_normal<Scalar>(rng, normal);
  return v;
}

/// Tensor of iid standard (real or complex) normal entries; a pure function
/// of (shape, seed).
template <class Scalar>
DenseTensor<Scalar> sample_gaussian(const Shape& shape, std::uint64_t seed) {
  Rng rng(seed);
  return DenseTensor<Scalar>(shape, gaussian_vector<Scalar>(shape_size(shape), rng));
}

}  // namespace simstruct
