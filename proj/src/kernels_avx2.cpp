// AVX2+FMA variants of the angle kernels. This translation unit is compiled
// with -mavx2 -mfma and only entered after a runtime CPU check, so the rest
// of the library stays baseline-ISA.
#if defined(EQUIMESH_HAVE_AVX2)

#include <immintrin.h>

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

#include "equimesh/kernels.hpp"
#include "equimesh/lobachevsky.hpp"

namespace equimesh::kernels {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = 1.5707963267948966;
// double(pi) and the residual pi - double(pi); (pi_hi - x) + pi_lo gives
// pi - x to ~1 ulp for x in [pi/2, pi] (the subtraction is exact there).
constexpr double kPiHi = 3.14159265358979311600e+00;
constexpr double kPiLo = 1.22464679914735317723e-16;
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;

inline __m256d i64_to_f64(__m256i v) {
    // valid for |v| < 2^51, plenty for exponent fields
    const __m256i magic = _mm256_set1_epi64x(0x4338000000000000LL);
    return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_add_epi64(v, magic)),
                         _mm256_set1_pd(6755399441055744.0));
}

// ln(x) for positive finite x. Mantissa folded into [sqrt2/2, sqrt2), then
// the atanh series ln m = 2s + 2su*P(u), s = (m-1)/(m+1), u = s^2. The
// series coefficients are exact, truncation is below 1e-18.
inline __m256d v_log(__m256d x) {
    const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
    const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
    const __m256d one = _mm256_set1_pd(1.0);

    __m256i bits = _mm256_castpd_si256(x);
    __m256i e_i = _mm256_sub_epi64(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(1023));
    __m256d m = _mm256_castsi256_pd(
        _mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
    __m256d e = i64_to_f64(e_i);

    __m256d fold = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), fold);
    e = _mm256_add_pd(e, _mm256_and_pd(fold, one));

    __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
    __m256d u = _mm256_mul_pd(s, s);

    __m256d p = _mm256_set1_pd(1.0 / 23);
    p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 21));
    p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 19));
    p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 17));
    p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 15));
    p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 13));
    p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 11));
    p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 9));
    p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 7));
    p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 5));
    p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 3));

    __m256d two_s = _mm256_add_pd(s, s);
    __m256d lo = _mm256_fmadd_pd(_mm256_mul_pd(two_s, u), p,
                                 _mm256_mul_pd(e, _mm256_set1_pd(kLn2Lo)));
    return _mm256_fmadd_pd(e, _mm256_set1_pd(kLn2Hi), _mm256_add_pd(two_s, lo));
}

struct SinCos {
    __m256d sin;
    __m256d cos;
    __m256d upper;  // lane mask: x > pi/2
};

// sin/cos for x in (0, pi) via reflection t = pi - x onto [0, pi/2] and
// exact-coefficient Taylor polynomials in t^2.
inline SinCos v_sincos_0pi(__m256d x) {
    const __m256d upper = _mm256_cmp_pd(x, _mm256_set1_pd(kHalfPi), _CMP_GT_OQ);
    const __m256d refl = _mm256_add_pd(_mm256_sub_pd(_mm256_set1_pd(kPiHi), x),
                                       _mm256_set1_pd(kPiLo));
    const __m256d t = _mm256_blendv_pd(x, refl, upper);
    const __m256d u = _mm256_mul_pd(t, t);

    __m256d q = _mm256_set1_pd(-1.0 / 25852016738884976640000.0);
    q = _mm256_fmadd_pd(q, u, _mm256_set1_pd(1.0 / 51090942171709440000.0));
    q = _mm256_fmadd_pd(q, u, _mm256_set1_pd(-1.0 / 121645100408832000.0));
    q = _mm256_fmadd_pd(q, u, _mm256_set1_pd(1.0 / 355687428096000.0));
    q = _mm256_fmadd_pd(q, u, _mm256_set1_pd(-1.0 / 1307674368000.0));
    q = _mm256_fmadd_pd(q, u, _mm256_set1_pd(1.0 / 6227020800.0));
    q = _mm256_fmadd_pd(q, u, _mm256_set1_pd(-1.0 / 39916800.0));
    q = _mm256_fmadd_pd(q, u, _mm256_set1_pd(1.0 / 362880.0));
    q = _mm256_fmadd_pd(q, u, _mm256_set1_pd(-1.0 / 5040.0));
    q = _mm256_fmadd_pd(q, u, _mm256_set1_pd(1.0 / 120.0));
    q = _mm256_fmadd_pd(q, u, _mm256_set1_pd(-1.0 / 6.0));
    const __m256d s = _mm256_fmadd_pd(_mm256_mul_pd(t, u), q, t);

    __m256d r = _mm256_set1_pd(1.0 / 620448401733239439360000.0);
    r = _mm256_fmadd_pd(r, u, _mm256_set1_pd(-1.0 / 1124000727777607680000.0));
    r = _mm256_fmadd_pd(r, u, _mm256_set1_pd(1.0 / 2432902008176640000.0));
    r = _mm256_fmadd_pd(r, u, _mm256_set1_pd(-1.0 / 6402373705728000.0));
    r = _mm256_fmadd_pd(r, u, _mm256_set1_pd(1.0 / 20922789888000.0));
    r = _mm256_fmadd_pd(r, u, _mm256_set1_pd(-1.0 / 87178291200.0));
    r = _mm256_fmadd_pd(r, u, _mm256_set1_pd(1.0 / 479001600.0));
    r = _mm256_fmadd_pd(r, u, _mm256_set1_pd(-1.0 / 3628800.0));
    r = _mm256_fmadd_pd(r, u, _mm256_set1_pd(1.0 / 40320.0));
    r = _mm256_fmadd_pd(r, u, _mm256_set1_pd(-1.0 / 720.0));
    r = _mm256_fmadd_pd(r, u, _mm256_set1_pd(1.0 / 24.0));
    r = _mm256_fmadd_pd(r, u, _mm256_set1_pd(-1.0 / 2.0));
    __m256d c = _mm256_fmadd_pd(u, r, _mm256_set1_pd(1.0));
    c = _mm256_xor_pd(c, _mm256_and_pd(upper, _mm256_set1_pd(-0.0)));

    return {s, c, upper};
}

// lob series coefficients, fixed length for the Horner evaluation. 26 terms
// keep the truncation below 1e-18 at t = pi/2.
constexpr int kLobTerms = 26;

const std::array<double, kLobTerms>& lob_coeffs() {
    static const std::array<double, kLobTerms> c = [] {
        std::array<double, kLobTerms> a{};
        auto src = equimesh::detail::lob_series_coeffs();
        for (int i = 0; i < kLobTerms; ++i) a[i] = src[i];
        return a;
    }();
    return c;
}

double lob_unchecked(double x) {
    const double r = std::remainder(x, kPi);
    return r < 0.0 ? -equimesh::detail::lob_reduced(-r) : equimesh::detail::lob_reduced(r);
}

double sum_lob_avx2(const double* a, std::size_t n) {
    const auto& c = lob_coeffs();
    const std::size_t n4 = n & ~std::size_t(3);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d x = _mm256_loadu_pd(a + i);
        const __m256d upper = _mm256_cmp_pd(x, _mm256_set1_pd(kHalfPi), _CMP_GT_OQ);
        const __m256d refl = _mm256_add_pd(_mm256_sub_pd(_mm256_set1_pd(kPiHi), x),
                                           _mm256_set1_pd(kPiLo));
        const __m256d t = _mm256_blendv_pd(x, refl, upper);
        const __m256d u = _mm256_mul_pd(t, t);

        __m256d poly = _mm256_set1_pd(c[kLobTerms - 1]);
        for (int k = kLobTerms - 2; k >= 0; --k)
            poly = _mm256_fmadd_pd(poly, u, _mm256_set1_pd(c[k]));

        const __m256d ln2t = v_log(_mm256_add_pd(t, t));
        // t - t*ln(2t) + (t*u)*poly
        __m256d val = _mm256_fmadd_pd(_mm256_mul_pd(t, u), poly,
                                      _mm256_fnmadd_pd(t, ln2t, t));
        val = _mm256_xor_pd(val, _mm256_and_pd(upper, _mm256_set1_pd(-0.0)));
        acc = _mm256_add_pd(acc, val);
    }
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    double total = _mm_cvtsd_f64(pair) + _mm_cvtsd_f64(_mm_unpackhi_pd(pair, pair));
    for (std::size_t i = n4; i < n; ++i) total += lob_unchecked(a[i]);
    return total;
}

void neg_log_2sin_avx2(const double* a, double* out, std::size_t n) {
    const std::size_t n4 = n & ~std::size_t(3);
    const __m256d sign = _mm256_set1_pd(-0.0);
    for (std::size_t i = 0; i < n4; i += 4) {
        const SinCos sc = v_sincos_0pi(_mm256_loadu_pd(a + i));
        const __m256d l = v_log(_mm256_add_pd(sc.sin, sc.sin));
        _mm256_storeu_pd(out + i, _mm256_xor_pd(l, sign));
    }
    for (std::size_t i = n4; i < n; ++i) out[i] = -std::log(2.0 * std::sin(a[i]));
}

void log_sin_avx2(const double* a, double* out, std::size_t n) {
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        const SinCos sc = v_sincos_0pi(_mm256_loadu_pd(a + i));
        _mm256_storeu_pd(out + i, v_log(sc.sin));
    }
    for (std::size_t i = n4; i < n; ++i) out[i] = std::log(std::sin(a[i]));
}

void cot_avx2(const double* a, double* out, std::size_t n) {
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        const SinCos sc = v_sincos_0pi(_mm256_loadu_pd(a + i));
        _mm256_storeu_pd(out + i, _mm256_div_pd(sc.cos, sc.sin));
    }
    for (std::size_t i = n4; i < n; ++i) out[i] = std::cos(a[i]) / std::sin(a[i]);
}

const KernelTable kAvx2Table{
    sum_lob_avx2, neg_log_2sin_avx2, log_sin_avx2, cot_avx2, "avx2"};

}  // namespace

const KernelTable* avx2_kernels() {
    static const KernelTable* table = []() -> const KernelTable* {
        if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
            lob_coeffs();  // touch once so later calls never race on init
            return &kAvx2Table;
        }
        return nullptr;
    }();
    return table;
}

}  // namespace equimesh::kernels

#endif  // EQUIMESH_HAVE_AVX2
