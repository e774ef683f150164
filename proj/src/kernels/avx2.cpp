#include <immintrin.h>

#include "washboard/kernels/kernels.hpp"

#include "scalar_impl.hpp"

namespace washboard::kernels {

namespace {

constexpr std::size_t kLanes = 4;

inline __m256d neg(__m256d v) { return _mm256_xor_pd(v, _mm256_set1_pd(-0.0)); }

inline __m256d poly6(const double (&c)[6], __m256d z) {
  __m256d r = _mm256_set1_pd(c[0]);
  for (int i = 1; i < 6; ++i) r = _mm256_add_pd(_mm256_mul_pd(r, z), _mm256_set1_pd(c[i]));
  return r;
}

inline void sincos4(__m256d x, __m256d& s, __m256d& c) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d sign = _mm256_blendv_pd(_mm256_set1_pd(1.0), _mm256_set1_pd(-1.0),
                                        _mm256_cmp_pd(x, zero, _CMP_LT_OQ));
  const __m256d ax = _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
  __m256d y = _mm256_floor_pd(_mm256_mul_pd(ax, _mm256_set1_pd(detail::kFourOverPi)));
  const __m256d odd = _mm256_sub_pd(
      y, _mm256_mul_pd(_mm256_set1_pd(2.0), _mm256_floor_pd(_mm256_mul_pd(y, _mm256_set1_pd(0.5)))));
  y = _mm256_add_pd(y, odd);
  const __m256d j = _mm256_sub_pd(
      y,
      _mm256_mul_pd(_mm256_set1_pd(8.0), _mm256_floor_pd(_mm256_mul_pd(y, _mm256_set1_pd(0.125)))));
  __m256d z = _mm256_sub_pd(ax, _mm256_mul_pd(y, _mm256_set1_pd(detail::kDp1)));
  z = _mm256_sub_pd(z, _mm256_mul_pd(y, _mm256_set1_pd(detail::kDp2)));
  z = _mm256_sub_pd(z, _mm256_mul_pd(y, _mm256_set1_pd(detail::kDp3)));
  const __m256d zz = _mm256_mul_pd(z, z);
  const __m256d ps =
      _mm256_add_pd(z, _mm256_mul_pd(_mm256_mul_pd(z, zz), poly6(detail::kSinCoef, zz)));
  const __m256d pc =
      _mm256_add_pd(_mm256_sub_pd(_mm256_set1_pd(1.0), _mm256_mul_pd(_mm256_set1_pd(0.5), zz)),
                    _mm256_mul_pd(_mm256_mul_pd(zz, zz), poly6(detail::kCosCoef, zz)));

  const __m256d m0 = _mm256_cmp_pd(j, _mm256_set1_pd(0.0), _CMP_EQ_OQ);
  const __m256d m2 = _mm256_cmp_pd(j, _mm256_set1_pd(2.0), _CMP_EQ_OQ);
  const __m256d m4 = _mm256_cmp_pd(j, _mm256_set1_pd(4.0), _CMP_EQ_OQ);
  __m256d sv = neg(pc);
  __m256d cv = ps;
  sv = _mm256_blendv_pd(sv, neg(ps), m4);
  cv = _mm256_blendv_pd(cv, neg(pc), m4);
  sv = _mm256_blendv_pd(sv, pc, m2);
  cv = _mm256_blendv_pd(cv, neg(ps), m2);
  sv = _mm256_blendv_pd(sv, ps, m0);
  cv = _mm256_blendv_pd(cv, pc, m0);
  s = _mm256_mul_pd(sign, sv);
  c = cv;
}

void sincos_avx2(std::span<const double> x, std::span<double> s, std::span<double> c) {
  const std::size_t n = x.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d sv;
    __m256d cv;
    sincos4(_mm256_loadu_pd(x.data() + i), sv, cv);
    _mm256_storeu_pd(s.data() + i, sv);
    _mm256_storeu_pd(c.data() + i, cv);
  }
  for (; i < n; ++i) detail::sincos_one(x[i], s[i], c[i]);
}

void euler_maruyama_avx2(std::span<double> q, std::span<double> p, std::span<const double> xi,
                         const LangevinStep& st) {
  const std::size_t n = q.size();
  const std::size_t harmonics = st.cos_coeffs.size();
  const __m256d w = _mm256_set1_pd(st.wavenumber);
  const __m256d dt = _mm256_set1_pd(st.dt);
  const __m256d force = _mm256_set1_pd(st.force);
  const __m256d gamma = _mm256_set1_pd(st.gamma);
  const __m256d noise = _mm256_set1_pd(st.noise);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d qv = _mm256_loadu_pd(q.data() + i);
    const __m256d pv = _mm256_loadu_pd(p.data() + i);
    const __m256d xv = _mm256_loadu_pd(xi.data() + i);
    const __m256d qn = _mm256_add_pd(qv, _mm256_mul_pd(pv, dt));
    __m256d s1;
    __m256d c1;
    sincos4(_mm256_mul_pd(w, qn), s1, c1);
    __m256d sk = s1;
    __m256d ck = c1;
    __m256d dv = _mm256_setzero_pd();
    for (std::size_t k = 0; k < harmonics; ++k) {
      const __m256d kw = _mm256_set1_pd(static_cast<double>(k + 1) * st.wavenumber);
      const __m256d term = _mm256_sub_pd(_mm256_mul_pd(_mm256_set1_pd(st.sin_coeffs[k]), ck),
                                         _mm256_mul_pd(_mm256_set1_pd(st.cos_coeffs[k]), sk));
      dv = _mm256_add_pd(dv, _mm256_mul_pd(kw, term));
      const __m256d sn = _mm256_add_pd(_mm256_mul_pd(sk, c1), _mm256_mul_pd(ck, s1));
      const __m256d cn = _mm256_sub_pd(_mm256_mul_pd(ck, c1), _mm256_mul_pd(sk, s1));
      sk = sn;
      ck = cn;
    }
    __m256d a = _mm256_sub_pd(force, dv);
    a = _mm256_sub_pd(a, _mm256_mul_pd(gamma, pv));
    __m256d pn = _mm256_add_pd(pv, _mm256_mul_pd(a, dt));
    pn = _mm256_add_pd(pn, _mm256_mul_pd(noise, xv));
    _mm256_storeu_pd(q.data() + i, qn);
    _mm256_storeu_pd(p.data() + i, pn);
  }
  detail::euler_maruyama_range(q.data(), p.data(), xi.data(), i, n, st);
}

void hermite_table_avx2(std::span<const double> nodes, std::span<const double> seeds, int n_max,
                        std::span<double> out) {
  const std::size_t stride = nodes.size();
  std::size_t k = 0;
  for (; k + kLanes <= stride; k += kLanes) {
    const __m256d x = _mm256_loadu_pd(nodes.data() + k);
    __m256d prev = _mm256_loadu_pd(seeds.data() + k);
    _mm256_storeu_pd(out.data() + k, prev);
    if (n_max < 1) continue;
    __m256d cur = _mm256_mul_pd(x, prev);
    _mm256_storeu_pd(out.data() + stride + k, cur);
    for (int n = 1; n < n_max; ++n) {
      const __m256d a = _mm256_set1_pd(detail::hermite_a(n));
      const __m256d b = _mm256_set1_pd(detail::hermite_b(n));
      const __m256d next = _mm256_mul_pd(_mm256_sub_pd(_mm256_mul_pd(x, cur), _mm256_mul_pd(a, prev)), b);
      _mm256_storeu_pd(out.data() + static_cast<std::size_t>(n + 1) * stride + k, next);
      prev = cur;
      cur = next;
    }
  }
  detail::hermite_table_range(nodes.data(), seeds.data(), stride, k, stride, n_max, out.data());
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2", &euler_maruyama_avx2, &hermite_table_avx2, &sincos_avx2};
  return table;
}

}  // namespace washboard::kernels
