#pragma once

// Scalar reference arithmetic. The SIMD variants replay exactly this operation
// order per lane and fall back to these routines for remainder elements.

#include <cmath>
#include <cstddef>

#include "washboard/kernels/kernels.hpp"
#include "sincos_constants.hpp"

namespace washboard::kernels::detail {

inline double poly6(const double (&c)[6], double z) {
  double r = c[0];
  r = r * z + c[1];
  r = r * z + c[2];
  r = r * z + c[3];
  r = r * z + c[4];
  r = r * z + c[5];
  return r;
}

inline void sincos_one(double x, double& s, double& c) {
  const double sign = x < 0.0 ? -1.0 : 1.0;
  const double ax = std::fabs(x);
  double y = std::floor(ax * kFourOverPi);
  const double odd = y - 2.0 * std::floor(y * 0.5);
  y = y + odd;
  const double j = y - 8.0 * std::floor(y * 0.125);  // 0, 2, 4 or 6
  const double z = ((ax - y * kDp1) - y * kDp2) - y * kDp3;
  const double zz = z * z;
  const double ps = z + z * zz * poly6(kSinCoef, zz);
  const double pc = (1.0 - 0.5 * zz) + zz * zz * poly6(kCosCoef, zz);
  if (j == 0.0) {
    s = ps;
    c = pc;
  } else if (j == 2.0) {
    s = pc;
    c = -ps;
  } else if (j == 4.0) {
    s = -ps;
    c = -pc;
  } else {
    s = -pc;
    c = ps;
  }
  s = sign * s;
}

inline void euler_maruyama_one(double& q, double& p, double xi, const LangevinStep& st) {
  const double qn = q + p * st.dt;
  double s1 = 0.0;
  double c1 = 1.0;
  sincos_one(st.wavenumber * qn, s1, c1);
  double sk = s1;
  double ck = c1;
  double dv = 0.0;
  const std::size_t harmonics = st.cos_coeffs.size();
  for (std::size_t k = 0; k < harmonics; ++k) {
    const double kw = static_cast<double>(k + 1) * st.wavenumber;
    dv = dv + kw * (st.sin_coeffs[k] * ck - st.cos_coeffs[k] * sk);
    const double sn = sk * c1 + ck * s1;
    const double cn = ck * c1 - sk * s1;
    sk = sn;
    ck = cn;
  }
  double a = st.force - dv;
  a = a - st.gamma * p;
  double pn = p + a * st.dt;
  pn = pn + st.noise * xi;
  q = qn;
  p = pn;
}

inline void euler_maruyama_range(double* q, double* p, const double* xi, std::size_t begin,
                                 std::size_t end, const LangevinStep& st) {
  for (std::size_t i = begin; i < end; ++i) euler_maruyama_one(q[i], p[i], xi[i], st);
}

inline double hermite_a(int n) { return std::sqrt(static_cast<double>(n)); }
inline double hermite_b(int n) { return 1.0 / std::sqrt(static_cast<double>(n + 1)); }

inline void hermite_table_range(const double* nodes, const double* seeds, std::size_t stride,
                                std::size_t begin, std::size_t end, int n_max, double* out) {
  for (std::size_t k = begin; k < end; ++k) {
    const double x = nodes[k];
    double prev = seeds[k];
    out[k] = prev;
    if (n_max < 1) continue;
    double cur = x * prev;
    out[stride + k] = cur;
    for (int n = 1; n < n_max; ++n) {
      const double next = (x * cur - hermite_a(n) * prev) * hermite_b(n);
      out[static_cast<std::size_t>(n + 1) * stride + k] = next;
      prev = cur;
      cur = next;
    }
  }
}

}  // namespace washboard::kernels::detail
