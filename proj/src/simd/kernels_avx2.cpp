// AVX2 variants. Compiled with -mavx2 only (no FMA) so that every lane
// performs exactly the roundings of the scalar reference.

#include "nlab/simd/kernels.hpp"

#include "vecmath.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace nlab::simd::detail {

#if defined(__AVX2__)
namespace {

inline __m256d exp4(__m256d x)
{
    const __m256d xc = _mm256_min_pd(_mm256_max_pd(x, _mm256_set1_pd(kExpMin)),
                                     _mm256_set1_pd(kExpMax));
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, _mm256_set1_pd(kLog2e)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    const __m256d r = _mm256_sub_pd(_mm256_sub_pd(xc, _mm256_mul_pd(n, _mm256_set1_pd(kLn2Hi))),
                                    _mm256_mul_pd(n, _mm256_set1_pd(kLn2Lo)));
    __m256d p = _mm256_set1_pd(kExpCoeff[kExpDegree]);
    for (int k = kExpDegree - 1; k >= 0; --k)
        p = _mm256_add_pd(_mm256_mul_pd(p, r), _mm256_set1_pd(kExpCoeff[k]));
    const __m256d t = _mm256_add_pd(_mm256_add_pd(n, _mm256_set1_pd(1023.0)), _mm256_set1_pd(kTwo52));
    __m256i bits = _mm256_and_si256(_mm256_castpd_si256(t),
                                    _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll));
    bits = _mm256_slli_epi64(bits, 52);
    __m256d res = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
    res = _mm256_blendv_pd(res, _mm256_set1_pd(INFINITY),
                           _mm256_cmp_pd(x, _mm256_set1_pd(kExpMax), _CMP_GT_OQ));
    res = _mm256_blendv_pd(res, _mm256_setzero_pd(),
                           _mm256_cmp_pd(x, _mm256_set1_pd(kExpMin), _CMP_LT_OQ));
    return res;
}

inline __m256d log4(__m256d x)
{
    const __m256i bits = _mm256_castpd_si256(x);
    const __m256i eb = _mm256_and_si256(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(0x7ff));
    const __m256d ebias = _mm256_sub_pd(
        _mm256_castsi256_pd(_mm256_or_si256(eb, _mm256_set1_epi64x(0x4330000000000000ll))),
        _mm256_set1_pd(kTwo52));
    __m256d m = _mm256_castsi256_pd(
        _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll)),
                        _mm256_set1_epi64x(0x3FF0000000000000ll)));
    __m256d e = _mm256_sub_pd(ebias, _mm256_set1_pd(1023.0));
    const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
    e = _mm256_blendv_pd(e, _mm256_add_pd(e, _mm256_set1_pd(1.0)), big);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
    const __m256d s2 = _mm256_mul_pd(s, s);
    __m256d p = _mm256_set1_pd(kLogCoeff[kLogTerms - 1]);
    for (int k = kLogTerms - 2; k >= 0; --k)
        p = _mm256_add_pd(_mm256_mul_pd(p, s2), _mm256_set1_pd(kLogCoeff[k]));
    const __m256d logm = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(2.0), s), p);
    __m256d res = _mm256_add_pd(_mm256_mul_pd(e, _mm256_set1_pd(kLn2Hi)),
                                _mm256_add_pd(logm, _mm256_mul_pd(e, _mm256_set1_pd(kLn2Lo))));
    res = _mm256_blendv_pd(res, _mm256_set1_pd(-INFINITY),
                           _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_EQ_OQ));
    return res;
}

inline void mulhilo(__m256i a, __m256i m, __m256i& hi, __m256i& lo)
{
    const __m256i even = _mm256_mul_epu32(a, m);
    const __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), m);
    lo = _mm256_blend_epi32(even, _mm256_slli_epi64(odd, 32), 0xAA);
    hi = _mm256_blend_epi32(_mm256_srli_epi64(even, 32), odd, 0xAA);
}

inline void philox8(__m256i c[4], std::uint32_t k0, std::uint32_t k1)
{
    const __m256i m0 = _mm256_set1_epi32(static_cast<int>(kPhiloxM0));
    const __m256i m1 = _mm256_set1_epi32(static_cast<int>(kPhiloxM1));
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k0 += kPhiloxW0;
            k1 += kPhiloxW1;
        }
        __m256i hi0, lo0, hi1, lo1;
        mulhilo(c[0], m0, hi0, lo0);
        mulhilo(c[2], m1, hi1, lo1);
        const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c[1]),
                                            _mm256_set1_epi32(static_cast<int>(k0)));
        const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c[3]),
                                            _mm256_set1_epi32(static_cast<int>(k1)));
        c[0] = n0;
        c[1] = lo1;
        c[2] = n2;
        c[3] = lo0;
    }
}

inline void uniforms8(__m256i a, __m256i b, double* out)
{
    const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000ll);
    for (int half = 0; half < 2; ++half) {
        const __m128i ah = half == 0 ? _mm256_castsi256_si128(a) : _mm256_extracti128_si256(a, 1);
        const __m128i bh = half == 0 ? _mm256_castsi256_si128(b) : _mm256_extracti128_si256(b, 1);
        __m256i v = _mm256_or_si256(_mm256_slli_epi64(_mm256_cvtepu32_epi64(ah), 32),
                                    _mm256_cvtepu32_epi64(bh));
        v = _mm256_or_si256(_mm256_srli_epi64(v, 12), one_bits);
        const __m256d d = _mm256_add_pd(_mm256_sub_pd(_mm256_castsi256_pd(v), _mm256_set1_pd(1.0)),
                                        _mm256_set1_pd(kHalfUlp));
        _mm256_storeu_pd(out + 4 * half, d);
    }
}

void philox_uniform_pairs(PhiloxKey key, std::uint32_t purpose, std::uint32_t slot_pair,
                          std::uint64_t first_sample, std::size_t n, double* even_out,
                          double* odd_out)
{
    std::size_t i = 0;
    alignas(32) std::uint32_t lo[8];
    alignas(32) std::uint32_t hi[8];
    for (; i + 8 <= n; i += 8) {
        for (int l = 0; l < 8; ++l) {
            const std::uint64_t s = first_sample + i + l;
            lo[l] = static_cast<std::uint32_t>(s);
            hi[l] = static_cast<std::uint32_t>(s >> 32);
        }
        __m256i c[4] = {_mm256_set1_epi32(static_cast<int>(slot_pair)),
                        _mm256_load_si256(reinterpret_cast<const __m256i*>(lo)),
                        _mm256_load_si256(reinterpret_cast<const __m256i*>(hi)),
                        _mm256_set1_epi32(static_cast<int>(purpose))};
        philox8(c, key.k0, key.k1);
        uniforms8(c[0], c[1], even_out + i);
        uniforms8(c[2], c[3], odd_out + i);
    }
    if (i < n)
        scalar_kernels().philox_uniform_pairs(key, purpose, slot_pair, first_sample + i, n - i,
                                              even_out + i, odd_out + i);
}

void philox_blocks(PhiloxKey key, const std::uint32_t ctr[4], std::size_t n, std::uint32_t* out)
{
    std::size_t i = 0;
    alignas(32) std::uint32_t w[4][8];
    for (; i + 8 <= n; i += 8) {
        const auto base = ctr[0] + static_cast<std::uint32_t>(i);
        __m256i c[4] = {
            _mm256_add_epi32(_mm256_set1_epi32(static_cast<int>(base)),
                             _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7)),
            _mm256_set1_epi32(static_cast<int>(ctr[1])),
            _mm256_set1_epi32(static_cast<int>(ctr[2])),
            _mm256_set1_epi32(static_cast<int>(ctr[3]))};
        philox8(c, key.k0, key.k1);
        for (int k = 0; k < 4; ++k) _mm256_store_si256(reinterpret_cast<__m256i*>(w[k]), c[k]);
        for (int l = 0; l < 8; ++l)
            for (int k = 0; k < 4; ++k) out[4 * (i + l) + k] = w[k][l];
    }
    if (i < n) {
        const std::uint32_t rest[4] = {ctr[0] + static_cast<std::uint32_t>(i), ctr[1], ctr[2], ctr[3]};
        scalar_kernels().philox_blocks(key, rest, n - i, out + 4 * i);
    }
}

void exp_kernel(const double* x, std::size_t n, double* out)
{
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, exp4(_mm256_loadu_pd(x + i)));
    for (; i < n; ++i) out[i] = exp_ref(x[i]);
}

void log_kernel(const double* x, std::size_t n, double* out)
{
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, log4(_mm256_loadu_pd(x + i)));
    for (; i < n; ++i) out[i] = log_ref(x[i]);
}

void power_law(const double* q, std::size_t n, double scale, double exponent, double* out)
{
    std::size_t i = 0;
    const __m256d sc = _mm256_set1_pd(scale);
    const __m256d ex = _mm256_set1_pd(exponent);
    for (; i + 4 <= n; i += 4) {
        const __m256d l = log4(_mm256_loadu_pd(q + i));
        _mm256_storeu_pd(out + i, _mm256_mul_pd(sc, exp4(_mm256_mul_pd(ex, l))));
    }
    for (; i < n; ++i) out[i] = scale * exp_ref(exponent * log_ref(q[i]));
}

inline std::uint64_t popcount_mask(__m256d m)
{
    return static_cast<std::uint64_t>(__builtin_popcount(_mm256_movemask_pd(m)));
}

std::uint64_t count_euclid(const double* const* coords, int dim, std::size_t n,
                           const double* center, double r2)
{
    std::uint64_t count = 0;
    std::size_t i = 0;
    const __m256d rr = _mm256_set1_pd(r2);
    for (; i + 4 <= n; i += 4) {
        __m256d s = _mm256_setzero_pd();
        for (int k = 0; k < dim; ++k) {
            const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(coords[k] + i), _mm256_set1_pd(center[k]));
            s = _mm256_add_pd(s, _mm256_mul_pd(d, d));
        }
        count += popcount_mask(_mm256_cmp_pd(s, rr, _CMP_LE_OQ));
    }
    if (i < n) {
        const double* rest[kMaxCountDim];
        for (int k = 0; k < dim; ++k) rest[k] = coords[k] + i;
        count += scalar_kernels().count_euclid(rest, dim, n - i, center, r2);
    }
    return count;
}

std::uint64_t count_lq(const double* const* coords, int dim, std::size_t n, const double* center,
                       double q, double rq)
{
    std::uint64_t count = 0;
    std::size_t i = 0;
    const __m256d qq = _mm256_set1_pd(q);
    const __m256d sign = _mm256_set1_pd(-0.0);
    for (; i + 4 <= n; i += 4) {
        __m256d s = _mm256_setzero_pd();
        for (int k = 0; k < dim; ++k) {
            const __m256d d = _mm256_andnot_pd(
                sign, _mm256_sub_pd(_mm256_loadu_pd(coords[k] + i), _mm256_set1_pd(center[k])));
            s = _mm256_add_pd(s, exp4(_mm256_mul_pd(qq, log4(d))));
        }
        count += popcount_mask(_mm256_cmp_pd(s, _mm256_set1_pd(rq), _CMP_LE_OQ));
    }
    if (i < n) {
        const double* rest[kMaxCountDim];
        for (int k = 0; k < dim; ++k) rest[k] = coords[k] + i;
        count += scalar_kernels().count_lq(rest, dim, n - i, center, q, rq);
    }
    return count;
}

std::uint64_t count_koranyi(const double* x, const double* y, const double* z, std::size_t n,
                            const double* c, double r4)
{
    std::uint64_t count = 0;
    std::size_t i = 0;
    const __m256d cx = _mm256_set1_pd(c[0]);
    const __m256d cy = _mm256_set1_pd(c[1]);
    const __m256d cz = _mm256_set1_pd(c[2]);
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        const __m256d yv = _mm256_loadu_pd(y + i);
        const __m256d zv = _mm256_loadu_pd(z + i);
        const __m256d dx = _mm256_sub_pd(xv, cx);
        const __m256d dy = _mm256_sub_pd(yv, cy);
        const __m256d cross = _mm256_sub_pd(_mm256_mul_pd(cx, yv), _mm256_mul_pd(cy, xv));
        const __m256d dz = _mm256_sub_pd(_mm256_sub_pd(zv, cz),
                                         _mm256_mul_pd(_mm256_set1_pd(0.5), cross));
        const __m256d h = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
        const __m256d g = _mm256_add_pd(_mm256_mul_pd(h, h),
                                        _mm256_mul_pd(_mm256_set1_pd(16.0), _mm256_mul_pd(dz, dz)));
        count += popcount_mask(_mm256_cmp_pd(g, _mm256_set1_pd(r4), _CMP_LE_OQ));
    }
    if (i < n) count += scalar_kernels().count_koranyi(x + i, y + i, z + i, n - i, c, r4);
    return count;
}

Moments moments(const double* w, std::size_t n)
{
    __m256d s = _mm256_setzero_pd();
    __m256d q = _mm256_setzero_pd();
    const std::size_t full = n - n % 4;
    for (std::size_t i = 0; i < full; i += 4) {
        const __m256d v = _mm256_loadu_pd(w + i);
        s = _mm256_add_pd(s, v);
        q = _mm256_add_pd(q, _mm256_mul_pd(v, v));
    }
    alignas(32) double sl[4];
    alignas(32) double ql[4];
    _mm256_store_pd(sl, s);
    _mm256_store_pd(ql, q);
    for (std::size_t i = full; i < n; ++i) {
        sl[i - full] = sl[i - full] + w[i];
        ql[i - full] = ql[i - full] + w[i] * w[i];
    }
    return {(sl[0] + sl[1]) + (sl[2] + sl[3]), (ql[0] + ql[1]) + (ql[2] + ql[3])};
}

}  // namespace

const KernelTable* avx2_table_if_built()
{
    static const KernelTable table{
        "avx2",        philox_uniform_pairs, philox_blocks, exp_kernel,
        log_kernel,    power_law,            count_euclid,  count_lq,
        count_koranyi, moments,
    };
    return &table;
}

#else

const KernelTable* avx2_table_if_built() { return nullptr; }

#endif

}  // namespace nlab::simd::detail
