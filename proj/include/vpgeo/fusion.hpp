#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "vpgeo/errors.hpp"
#include "vpgeo/rng.hpp"

namespace vpgeo {

using FeatureVector = std::vector<double>;

/// Random projection used by the count sketch: every input slot i is
/// assigned a target bucket and a sign. Both are pure functions of
/// (seed, i), so the plan is reproducible from its parameters alone:
///   bucket[i] = stream_u64(seed, 2*i)     mod output_dim
///   sign[i]   = stream_u64(seed, 2*i + 1) lowest bit, 0 -> -1, 1 -> +1
struct SketchPlan {
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  std::vector<std::uint32_t> bucket;
  std::vector<std::int8_t> sign;
  std::uint64_t seed = 0;
};

inline SketchPlan make_sketch_plan(std::size_t input_dim,
                                   std::size_t output_dim,
                                   std::uint64_t seed) {
  if (input_dim == 0 || output_dim == 0) {
    throw ValidationError("sketch plan dimensions must be positive");
  }
  SketchPlan plan;
  plan.input_dim = input_dim;
  plan.output_dim = output_dim;
  plan.seed = seed;
  plan.bucket.resize(input_dim);
  plan.sign.resize(input_dim);
  for (std::size_t i = 0; i < input_dim; ++i) {
    plan.bucket[i] = static_cast<std::uint32_t>(
        stream_u64(seed, 2 * static_cast<std::uint64_t>(i)) % output_dim);
    plan.sign[i] =
        (stream_u64(seed, 2 * static_cast<std::uint64_t>(i) + 1) & 1u) ? 1 : -1;
  }
  return plan;
}

/// Signed bucket sums: out[k] = sum over {i : bucket[i] == k} of sign[i]*x[i].
inline FeatureVector count_sketch(const FeatureVector& x,
                                  const SketchPlan& plan) {
  if (x.size() != plan.input_dim) {
    throw DimensionMismatch("input length does not match sketch plan");
  }
  FeatureVector out(plan.output_dim, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[plan.bucket[i]] += static_cast<double>(plan.sign[i]) * x[i];
  }
  return out;
}

namespace detail {

using Cplx = std::complex<double>;

/// In-place iterative radix-2 transform. Size must be a power of two.
/// No scaling is applied in either direction.
inline void fft_pow2(std::vector<Cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double pi = 3.14159265358979323846;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const Cplx wlen = std::polar(1.0, ang);
    for (std::size_t i = 0; i < n; i += len) {
      Cplx w{1.0, 0.0};
      for (std::size_t k = 0; k < len / 2; ++k) {
        const Cplx u = a[i + k];
        const Cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

/// Discrete Fourier transform for arbitrary length. Powers of two go through
/// the radix-2 kernel directly; other lengths use Bluestein's chirp-z
/// reduction to a power-of-two convolution. The chirp exponent is reduced
/// modulo 2n before the trig call to keep angles small.
inline std::vector<Cplx> dft(std::vector<Cplx> a, bool inverse) {
  const std::size_t n = a.size();
  if (n <= 1) return a;
  if (inverse) {
    for (auto& v : a) v = std::conj(v);
    a = dft(std::move(a), false);
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : a) v = std::conj(v) * scale;
    return a;
  }
  if ((n & (n - 1)) == 0) {
    fft_pow2(a, false);
    return a;
  }
  const double pi = 3.14159265358979323846;
  std::vector<Cplx> chirp(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint64_t e =
        (static_cast<std::uint64_t>(j) * j) % (2 * static_cast<std::uint64_t>(n));
    chirp[j] = std::polar(1.0, -pi * static_cast<double>(e) / static_cast<double>(n));
  }
  const std::size_t m = next_pow2(2 * n - 1);
  std::vector<Cplx> fa(m, Cplx{0.0, 0.0});
  std::vector<Cplx> fb(m, Cplx{0.0, 0.0});
  for (std::size_t j = 0; j < n; ++j) fa[j] = a[j] * chirp[j];
  fb[0] = std::conj(chirp[0]);
  for (std::size_t j = 1; j < n; ++j) {
    fb[j] = std::conj(chirp[j]);
    fb[m - j] = fb[j];
  }
  fft_pow2(fa, false);
  fft_pow2(fb, false);
  for (std::size_t i = 0; i < m; ++i) fa[i] *= fb[i];
  fft_pow2(fa, true);
  const double scale = 1.0 / static_cast<double>(m);
  std::vector<Cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = fa[k] * scale * chirp[k];
  return out;
}

inline std::vector<double> circular_convolution(const std::vector<double>& a,
                                                const std::vector<double>& b) {
  const std::size_t n = a.size();
  std::vector<Cplx> fa(n), fb(n);
  for (std::size_t i = 0; i < n; ++i) {
    fa[i] = Cplx{a[i], 0.0};
    fb[i] = Cplx{b[i], 0.0};
  }
  fa = dft(std::move(fa), false);
  fb = dft(std::move(fb), false);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  fa = dft(std::move(fa), true);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fa[i].real();
  return out;
}

}  // namespace detail

/// Compact bilinear pooling: sketch both inputs, then merge with a circular
/// convolution evaluated in the frequency domain. Equivalent to count
/// sketching the full outer product x (x) y under the combined hash
/// bucket(i,j) = (bucket_x[i] + bucket_y[j]) mod d, sign(i,j) =
/// sign_x[i]*sign_y[j], without ever forming the outer product.
inline FeatureVector mcb_pool(const FeatureVector& x, const FeatureVector& y,
                              const SketchPlan& plan_x,
                              const SketchPlan& plan_y) {
  if (plan_x.output_dim != plan_y.output_dim) {
    throw DimensionMismatch("sketch plans disagree on output dimension");
  }
  const FeatureVector sx = count_sketch(x, plan_x);
  const FeatureVector sy = count_sketch(y, plan_y);
  return detail::circular_convolution(sx, sy);
}

/// Order-preserving concatenation.
inline FeatureVector concat(const std::vector<FeatureVector>& parts) {
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  FeatureVector out;
  out.reserve(total);
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace vpgeo
