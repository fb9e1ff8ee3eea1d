#pragma once

#include <cmath>
#include <cstddef>
#include <string>

namespace camel::kern {

// ---------------------------------------------------------------------------
// Scalar reference kernels.
//
// These templates define the semantics of every inner loop in the project.
// The float instantiations can be replaced at runtime by SIMD variants (see
// dispatch below); the double instantiations are used by the gradient-check
// oracles and always run scalar. Elementwise kernels and the two row-major
// matmuls accumulate in the same order as the AVX2 variants, so those pairs
// agree bit-for-bit; matmul_bt reduces in a different order and is only
// equivalent to tolerance.
// ---------------------------------------------------------------------------

namespace scalar {

// C(MxN) = A(MxK) * B(KxN)
template <typename T>
void matmul(int M, int N, int K, const T* A, const T* B, T* C) {
    for (int i = 0; i < M; ++i) {
        T* c = C + static_cast<size_t>(i) * N;
        for (int j = 0; j < N; ++j) c[j] = T(0);
        for (int k = 0; k < K; ++k) {
            const T a = A[static_cast<size_t>(i) * K + k];
            const T* b = B + static_cast<size_t>(k) * N;
            for (int j = 0; j < N; ++j) c[j] += a * b[j];
        }
    }
}

// C(MxN) = A^T * B where A is (KxM)
template <typename T>
void matmul_at(int M, int N, int K, const T* A, const T* B, T* C) {
    for (int i = 0; i < M; ++i) {
        T* c = C + static_cast<size_t>(i) * N;
        for (int j = 0; j < N; ++j) c[j] = T(0);
        for (int k = 0; k < K; ++k) {
            const T a = A[static_cast<size_t>(k) * M + i];
            const T* b = B + static_cast<size_t>(k) * N;
            for (int j = 0; j < N; ++j) c[j] += a * b[j];
        }
    }
}

// C(MxN) = A(MxK) * B^T where B is (NxK)
template <typename T>
void matmul_bt(int M, int N, int K, const T* A, const T* B, T* C) {
    for (int i = 0; i < M; ++i) {
        const T* a = A + static_cast<size_t>(i) * K;
        T* c = C + static_cast<size_t>(i) * N;
        for (int j = 0; j < N; ++j) {
            const T* b = B + static_cast<size_t>(j) * K;
            T acc = T(0);
            for (int k = 0; k < K; ++k) acc += a[k] * b[k];
            c[j] = acc;
        }
    }
}

template <typename T>
void add_bias(int M, int N, T* Y, const T* bias) {
    for (int i = 0; i < M; ++i) {
        T* y = Y + static_cast<size_t>(i) * N;
        for (int j = 0; j < N; ++j) y[j] += bias[j];
    }
}

// out(N) = column sums of Y(MxN)
template <typename T>
void col_sum(int M, int N, const T* Y, T* out) {
    for (int j = 0; j < N; ++j) out[j] = T(0);
    for (int i = 0; i < M; ++i) {
        const T* y = Y + static_cast<size_t>(i) * N;
        for (int j = 0; j < N; ++j) out[j] += y[j];
    }
}

template <typename T>
void relu_fwd(size_t n, const T* x, T* y) {
    for (size_t i = 0; i < n; ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
}

// dx = dy where x > 0, else 0
template <typename T>
void relu_bwd(size_t n, const T* x, const T* dy, T* dx) {
    for (size_t i = 0; i < n; ++i) dx[i] = x[i] > T(0) ? dy[i] : T(0);
}

// y += a * x
template <typename T>
void axpy(size_t n, T a, const T* x, T* y) {
    for (size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

template <typename T>
void scale(size_t n, T a, T* x) {
    for (size_t i = 0; i < n; ++i) x[i] *= a;
}

// Fused Adam update. b1c = 1 - beta1^t, b2c = 1 - beta2^t (t >= 1).
template <typename T>
void adam_step(size_t n, T* w, const T* g, T* m, T* v, T lr, T beta1, T beta2, T eps, T b1c, T b2c) {
    for (size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (T(1) - beta1) * g[i];
        v[i] = beta2 * v[i] + (T(1) - beta2) * (g[i] * g[i]);
        const T mhat = m[i] / b1c;
        const T vhat = v[i] / b2c;
        w[i] -= lr * (mhat / (std::sqrt(vhat) + eps));
    }
}

}  // namespace scalar

// ---------------------------------------------------------------------------
// Runtime-dispatched float entry points.
// ---------------------------------------------------------------------------

enum class Backend { scalar, avx2 };

bool cpu_has_avx2();
Backend active_backend();
// Force a backend (tests, or the CAMEL_KERNELS=scalar|avx2 env override read
// at startup). Throws InputError if the backend is unavailable.
void set_backend(Backend b);
std::string backend_name(Backend b);

struct KernelTable {
    void (*matmul)(int, int, int, const float*, const float*, float*);
    void (*matmul_at)(int, int, int, const float*, const float*, float*);
    void (*matmul_bt)(int, int, int, const float*, const float*, float*);
    void (*add_bias)(int, int, float*, const float*);
    void (*col_sum)(int, int, const float*, float*);
    void (*relu_fwd)(size_t, const float*, float*);
    void (*relu_bwd)(size_t, const float*, const float*, float*);
    void (*axpy)(size_t, float, const float*, float*);
    void (*scale)(size_t, float, float*);
    void (*adam_step)(size_t, float*, const float*, float*, float*, float, float, float, float, float, float);
};

const KernelTable& table();
const KernelTable& scalar_table();
// Null when the binary was built without AVX2 support.
const KernelTable* avx2_table();

// Front doors: generic type -> scalar reference, float -> dispatched.
template <typename T>
void matmul(int M, int N, int K, const T* A, const T* B, T* C) { scalar::matmul(M, N, K, A, B, C); }
inline void matmul(int M, int N, int K, const float* A, const float* B, float* C) { table().matmul(M, N, K, A, B, C); }

template <typename T>
void matmul_at(int M, int N, int K, const T* A, const T* B, T* C) { scalar::matmul_at(M, N, K, A, B, C); }
inline void matmul_at(int M, int N, int K, const float* A, const float* B, float* C) { table().matmul_at(M, N, K, A, B, C); }

template <typename T>
void matmul_bt(int M, int N, int K, const T* A, const T* B, T* C) { scalar::matmul_bt(M, N, K, A, B, C); }
inline void matmul_bt(int M, int N, int K, const float* A, const float* B, float* C) { table().matmul_bt(M, N, K, A, B, C); }

template <typename T>
void add_bias(int M, int N, T* Y, const T* b) { scalar::add_bias(M, N, Y, b); }
inline void add_bias(int M, int N, float* Y, const float* b) { table().add_bias(M, N, Y, b); }

template <typename T>
void col_sum(int M, int N, const T* Y, T* out) { scalar::col_sum(M, N, Y, out); }
inline void col_sum(int M, int N, const float* Y, float* out) { table().col_sum(M, N, Y, out); }

template <typename T>
void relu_fwd(size_t n, const T* x, T* y) { scalar::relu_fwd(n, x, y); }
inline void relu_fwd(size_t n, const float* x, float* y) { table().relu_fwd(n, x, y); }

template <typename T>
void relu_bwd(size_t n, const T* x, const T* dy, T* dx) { scalar::relu_bwd(n, x, dy, dx); }
inline void relu_bwd(size_t n, const float* x, const float* dy, float* dx) { table().relu_bwd(n, x, dy, dx); }

template <typename T>
void axpy(size_t n, T a, const T* x, T* y) { scalar::axpy(n, a, x, y); }
inline void axpy(size_t n, float a, const float* x, float* y) { table().axpy(n, a, x, y); }

template <typename T>
void scale(size_t n, T a, T* x) { scalar::scale(n, a, x); }
inline void scale(size_t n, float a, float* x) { table().scale(n, a, x); }

template <typename T>
void adam_step(size_t n, T* w, const T* g, T* m, T* v, T lr, T b1, T b2, T eps, T b1c, T b2c) {
    scalar::adam_step(n, w, g, m, v, lr, b1, b2, eps, b1c, b2c);
}
inline void adam_step(size_t n, float* w, const float* g, float* m, float* v, float lr, float b1, float b2,
                      float eps, float b1c, float b2c) {
    table().adam_step(n, w, g, m, v, lr, b1, b2, eps, b1c, b2c);
}

}  // namespace camel::kern
