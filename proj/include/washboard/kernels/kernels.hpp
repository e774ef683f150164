#pragma once

// Data-parallel inner loops with a scalar reference and SIMD variants.
//
// Every variant performs the same sequence of IEEE operations per lane (no
// fused multiply-add, no reassociation), so all variants are bit-identical
// to the scalar reference. The test suite checks this lane by lane.

#include <cstddef>
#include <span>
#include <string_view>

namespace washboard::kernels {

/// Parameters of one Euler-Maruyama step of
///   dq = p dt,  dp = (-V'(q) + F - gamma p) dt + sqrt(2 gamma / beta) dW
/// for a trigonometric-polynomial potential with base wavenumber `wavenumber`.
/// The position moves first and the force is taken at the new position (friction at
/// the old momentum). Evaluating the force at the old position instead overheats the
/// chain by O(dt omega^2 / gamma), which is ruinous for activated hopping.
struct LangevinStep {
  double dt = 0.0;
  double force = 0.0;
  double gamma = 0.0;
  double noise = 0.0;      // sqrt(2 gamma dt / beta)
  double wavenumber = 0.0; // 2 pi / L
  std::span<const double> cos_coeffs; // c_k, k = 1..K
  std::span<const double> sin_coeffs; // s_k, same length as cos_coeffs
};

using EulerMaruyamaFn = void (*)(std::span<double> q, std::span<double> p,
                                 std::span<const double> xi, const LangevinStep& step);

/// out[n * nodes.size() + k] = seeds[k] * H_n(nodes[k]) for n = 0..n_max, where
/// H_n(x) = He_n(x) / sqrt(n!) is the orthonormal probabilists' Hermite polynomial.
using HermiteTableFn = void (*)(std::span<const double> nodes, std::span<const double> seeds,
                                int n_max, std::span<double> out);

/// Batched sine and cosine with a Cody-Waite reduction and minimax polynomials.
using SinCosFn = void (*)(std::span<const double> x, std::span<double> s, std::span<double> c);

struct KernelTable {
  std::string_view name;
  EulerMaruyamaFn euler_maruyama;
  HermiteTableFn hermite_table;
  SinCosFn sincos;
};

const KernelTable& scalar_kernels();

/// Null when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

/// Fastest variant the running CPU supports. Setting WASHBOARD_KERNELS=scalar
/// in the environment forces the reference path.
const KernelTable& active_kernels();

}  // namespace washboard::kernels
