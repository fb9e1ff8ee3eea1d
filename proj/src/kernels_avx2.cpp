// AVX2 variants of the float kernels. Compiled with -mavx2 -mfma but only
// entered when the CPU reports AVX2 at runtime (see kernels_dispatch.cpp).
//
// Elementwise kernels, matmul and matmul_at accumulate in the same order as
// the scalar reference with separate mul/add, so they agree with it
// bit-for-bit. matmul_bt keeps 8 partial sums and reduces horizontally, so it
// agrees only to rounding.

#include "camel/kernels.hpp"

#if defined(CAMEL_BUILD_AVX2) && (defined(__x86_64__) || defined(__i386__))

#include <immintrin.h>

namespace camel::kern {
namespace avx2 {

namespace {

inline __attribute__((target("avx2,fma"))) float hsum8(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    lo = _mm_add_ps(lo, hi);
    __m128 sh = _mm_movehl_ps(lo, lo);
    lo = _mm_add_ps(lo, sh);
    sh = _mm_shuffle_ps(lo, lo, 0x1);
    lo = _mm_add_ss(lo, sh);
    return _mm_cvtss_f32(lo);
}

}  // namespace

__attribute__((target("avx2,fma"))) void matmul(int M, int N, int K, const float* A, const float* B, float* C) {
    const int n8 = N - (N % 8);
    for (int i = 0; i < M; ++i) {
        const float* a = A + static_cast<size_t>(i) * K;
        float* c = C + static_cast<size_t>(i) * N;
        for (int j = 0; j < n8; j += 8) {
            __m256 acc = _mm256_setzero_ps();
            for (int k = 0; k < K; ++k) {
                const __m256 av = _mm256_set1_ps(a[k]);
                const __m256 bv = _mm256_loadu_ps(B + static_cast<size_t>(k) * N + j);
                acc = _mm256_add_ps(acc, _mm256_mul_ps(av, bv));
            }
            _mm256_storeu_ps(c + j, acc);
        }
        for (int j = n8; j < N; ++j) {
            float acc = 0.0f;
            for (int k = 0; k < K; ++k) acc += a[k] * B[static_cast<size_t>(k) * N + j];
            c[j] = acc;
        }
    }
}

__attribute__((target("avx2,fma"))) void matmul_at(int M, int N, int K, const float* A, const float* B, float* C) {
    const int n8 = N - (N % 8);
    for (int i = 0; i < M; ++i) {
        float* c = C + static_cast<size_t>(i) * N;
        for (int j = 0; j < n8; j += 8) {
            __m256 acc = _mm256_setzero_ps();
            for (int k = 0; k < K; ++k) {
                const __m256 av = _mm256_set1_ps(A[static_cast<size_t>(k) * M + i]);
                const __m256 bv = _mm256_loadu_ps(B + static_cast<size_t>(k) * N + j);
                acc = _mm256_add_ps(acc, _mm256_mul_ps(av, bv));
            }
            _mm256_storeu_ps(c + j, acc);
        }
        for (int j = n8; j < N; ++j) {
            float acc = 0.0f;
            for (int k = 0; k < K; ++k) acc += A[static_cast<size_t>(k) * M + i] * B[static_cast<size_t>(k) * N + j];
            c[j] = acc;
        }
    }
}

__attribute__((target("avx2,fma"))) void matmul_bt(int M, int N, int K, const float* A, const float* B, float* C) {
    const int k8 = K - (K % 8);
    for (int i = 0; i < M; ++i) {
        const float* a = A + static_cast<size_t>(i) * K;
        float* c = C + static_cast<size_t>(i) * N;
        for (int j = 0; j < N; ++j) {
            const float* b = B + static_cast<size_t>(j) * K;
            __m256 acc = _mm256_setzero_ps();
            for (int k = 0; k < k8; k += 8)
                acc = _mm256_fmadd_ps(_mm256_loadu_ps(a + k), _mm256_loadu_ps(b + k), acc);
            float s = hsum8(acc);
            for (int k = k8; k < K; ++k) s += a[k] * b[k];
            c[j] = s;
        }
    }
}

__attribute__((target("avx2,fma"))) void add_bias(int M, int N, float* Y, const float* bias) {
    const int n8 = N - (N % 8);
    for (int i = 0; i < M; ++i) {
        float* y = Y + static_cast<size_t>(i) * N;
        for (int j = 0; j < n8; j += 8)
            _mm256_storeu_ps(y + j, _mm256_add_ps(_mm256_loadu_ps(y + j), _mm256_loadu_ps(bias + j)));
        for (int j = n8; j < N; ++j) y[j] += bias[j];
    }
}

__attribute__((target("avx2,fma"))) void col_sum(int M, int N, const float* Y, float* out) {
    const int n8 = N - (N % 8);
    for (int j = 0; j < n8; j += 8) _mm256_storeu_ps(out + j, _mm256_setzero_ps());
    for (int j = n8; j < N; ++j) out[j] = 0.0f;
    for (int i = 0; i < M; ++i) {
        const float* y = Y + static_cast<size_t>(i) * N;
        for (int j = 0; j < n8; j += 8)
            _mm256_storeu_ps(out + j, _mm256_add_ps(_mm256_loadu_ps(out + j), _mm256_loadu_ps(y + j)));
        for (int j = n8; j < N; ++j) out[j] += y[j];
    }
}

__attribute__((target("avx2,fma"))) void relu_fwd(size_t n, const float* x, float* y) {
    const size_t n8 = n - (n % 8);
    const __m256 zero = _mm256_setzero_ps();
    for (size_t i = 0; i < n8; i += 8) _mm256_storeu_ps(y + i, _mm256_max_ps(_mm256_loadu_ps(x + i), zero));
    for (size_t i = n8; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

__attribute__((target("avx2,fma"))) void relu_bwd(size_t n, const float* x, const float* dy, float* dx) {
    const size_t n8 = n - (n % 8);
    const __m256 zero = _mm256_setzero_ps();
    for (size_t i = 0; i < n8; i += 8) {
        const __m256 mask = _mm256_cmp_ps(_mm256_loadu_ps(x + i), zero, _CMP_GT_OQ);
        _mm256_storeu_ps(dx + i, _mm256_and_ps(mask, _mm256_loadu_ps(dy + i)));
    }
    for (size_t i = n8; i < n; ++i) dx[i] = x[i] > 0.0f ? dy[i] : 0.0f;
}

__attribute__((target("avx2,fma"))) void axpy(size_t n, float a, const float* x, float* y) {
    const size_t n8 = n - (n % 8);
    const __m256 av = _mm256_set1_ps(a);
    for (size_t i = 0; i < n8; i += 8)
        _mm256_storeu_ps(y + i, _mm256_add_ps(_mm256_loadu_ps(y + i), _mm256_mul_ps(av, _mm256_loadu_ps(x + i))));
    for (size_t i = n8; i < n; ++i) y[i] += a * x[i];
}

__attribute__((target("avx2,fma"))) void scale(size_t n, float a, float* x) {
    const size_t n8 = n - (n % 8);
    const __m256 av = _mm256_set1_ps(a);
    for (size_t i = 0; i < n8; i += 8) _mm256_storeu_ps(x + i, _mm256_mul_ps(av, _mm256_loadu_ps(x + i)));
    for (size_t i = n8; i < n; ++i) x[i] *= a;
}

__attribute__((target("avx2,fma"))) void adam_step(size_t n, float* w, const float* g, float* m, float* v, float lr,
                                                   float beta1, float beta2, float eps, float b1c, float b2c) {
    const size_t n8 = n - (n % 8);
    const __m256 b1 = _mm256_set1_ps(beta1);
    const __m256 b2 = _mm256_set1_ps(beta2);
    const __m256 omb1 = _mm256_set1_ps(1.0f - beta1);
    const __m256 omb2 = _mm256_set1_ps(1.0f - beta2);
    const __m256 b1cv = _mm256_set1_ps(b1c);
    const __m256 b2cv = _mm256_set1_ps(b2c);
    const __m256 epsv = _mm256_set1_ps(eps);
    const __m256 lrv = _mm256_set1_ps(lr);
    for (size_t i = 0; i < n8; i += 8) {
        const __m256 gv = _mm256_loadu_ps(g + i);
        __m256 mv = _mm256_loadu_ps(m + i);
        __m256 vv = _mm256_loadu_ps(v + i);
        mv = _mm256_add_ps(_mm256_mul_ps(b1, mv), _mm256_mul_ps(omb1, gv));
        vv = _mm256_add_ps(_mm256_mul_ps(b2, vv), _mm256_mul_ps(omb2, _mm256_mul_ps(gv, gv)));
        _mm256_storeu_ps(m + i, mv);
        _mm256_storeu_ps(v + i, vv);
        const __m256 mhat = _mm256_div_ps(mv, b1cv);
        const __m256 vhat = _mm256_div_ps(vv, b2cv);
        const __m256 den = _mm256_add_ps(_mm256_sqrt_ps(vhat), epsv);
        const __m256 upd = _mm256_mul_ps(lrv, _mm256_div_ps(mhat, den));
        _mm256_storeu_ps(w + i, _mm256_sub_ps(_mm256_loadu_ps(w + i), upd));
    }
    if (n8 < n) scalar::adam_step(n - n8, w + n8, g + n8, m + n8, v + n8, lr, beta1, beta2, eps, b1c, b2c);
}

}  // namespace avx2

const KernelTable* avx2_table() {
    static const KernelTable t = [] {
        KernelTable k;
        k.matmul = &avx2::matmul;
        k.matmul_at = &avx2::matmul_at;
        k.matmul_bt = &avx2::matmul_bt;
        k.add_bias = &avx2::add_bias;
        k.col_sum = &avx2::col_sum;
        k.relu_fwd = &avx2::relu_fwd;
        k.relu_bwd = &avx2::relu_bwd;
        k.axpy = &avx2::axpy;
        k.scale = &avx2::scale;
        k.adam_step = &avx2::adam_step;
        return k;
    }();
    return &t;
}

}  // namespace camel::kern

#else

namespace camel::kern {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace camel::kern

#endif
