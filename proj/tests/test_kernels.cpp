#include <doctest.h>

#include <cmath>
#include <vector>

#include "camel/kernels.hpp"
#include "camel/rng.hpp"

using namespace camel;

namespace {

std::vector<float> random_vec(size_t n, Rng& rng, double lo = -2.0, double hi = 2.0) {
    std::vector<float> v(n);
    for (auto& x : v) x = static_cast<float>(rng.uniform(lo, hi));
    return v;
}

std::vector<double> widen(const std::vector<float>& v) {
    return std::vector<double>(v.begin(), v.end());
}

}  // namespace

TEST_CASE("matmul variants match a double-precision reference") {
    Rng rng(41);
    for (int trial = 0; trial < 12; ++trial) {
        const int M = 1 + static_cast<int>(rng.below(17));
        const int N = 1 + static_cast<int>(rng.below(33));
        const int K = 1 + static_cast<int>(rng.below(65));
        auto A = random_vec(static_cast<size_t>(M) * K, rng);
        auto B = random_vec(static_cast<size_t>(K) * N, rng);

        std::vector<double> Cref(static_cast<size_t>(M) * N, 0.0);
        auto Ad = widen(A);
        auto Bd = widen(B);
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < N; ++j) {
                double acc = 0.0;
                for (int k = 0; k < K; ++k) acc += Ad[static_cast<size_t>(i) * K + k] * Bd[static_cast<size_t>(k) * N + j];
                Cref[static_cast<size_t>(i) * N + j] = acc;
            }

        std::vector<float> C(static_cast<size_t>(M) * N);
        kern::scalar_table().matmul(M, N, K, A.data(), B.data(), C.data());
        for (size_t i = 0; i < C.size(); ++i) CHECK(C[i] == doctest::Approx(Cref[i]).epsilon(1e-4));

        // A^T path: reinterpret A as (K x M) column-extracted transpose input
        std::vector<float> At(static_cast<size_t>(K) * M);
        for (int k = 0; k < K; ++k)
            for (int i = 0; i < M; ++i) At[static_cast<size_t>(k) * M + i] = A[static_cast<size_t>(i) * K + k];
        std::vector<float> C2(static_cast<size_t>(M) * N);
        kern::scalar_table().matmul_at(M, N, K, At.data(), B.data(), C2.data());
        for (size_t i = 0; i < C2.size(); ++i) CHECK(C2[i] == doctest::Approx(Cref[i]).epsilon(1e-4));

        // B^T path
        std::vector<float> Bt(static_cast<size_t>(N) * K);
        for (int k = 0; k < K; ++k)
            for (int j = 0; j < N; ++j) Bt[static_cast<size_t>(j) * K + k] = B[static_cast<size_t>(k) * N + j];
        std::vector<float> C3(static_cast<size_t>(M) * N);
        kern::scalar_table().matmul_bt(M, N, K, A.data(), Bt.data(), C3.data());
        for (size_t i = 0; i < C3.size(); ++i) CHECK(C3[i] == doctest::Approx(Cref[i]).epsilon(1e-4));
    }
}

TEST_CASE("avx2 variants agree with scalar reference") {
    const kern::KernelTable* simd = kern::avx2_table();
    if (simd == nullptr || !kern::cpu_has_avx2()) {
        MESSAGE("avx2 unavailable; skipping");
        return;
    }
    const kern::KernelTable& ref = kern::scalar_table();
    Rng rng(7);

    // sizes cover full 8-lane blocks plus ragged tails
    for (int trial = 0; trial < 20; ++trial) {
        const int M = 1 + static_cast<int>(rng.below(9));
        const int N = 1 + static_cast<int>(rng.below(41));
        const int K = 1 + static_cast<int>(rng.below(70));
        auto A = random_vec(static_cast<size_t>(M) * K, rng);
        auto B = random_vec(static_cast<size_t>(K) * N, rng);
        std::vector<float> c0(static_cast<size_t>(M) * N), c1(c0.size());

        // matmul and matmul_at accumulate in scalar order: bit-exact
        ref.matmul(M, N, K, A.data(), B.data(), c0.data());
        simd->matmul(M, N, K, A.data(), B.data(), c1.data());
        CHECK(c0 == c1);

        auto At = random_vec(static_cast<size_t>(K) * M, rng);
        ref.matmul_at(M, N, K, At.data(), B.data(), c0.data());
        simd->matmul_at(M, N, K, At.data(), B.data(), c1.data());
        CHECK(c0 == c1);

        // matmul_bt reduces horizontally: tolerance only
        auto Bt = random_vec(static_cast<size_t>(N) * K, rng);
        ref.matmul_bt(M, N, K, A.data(), Bt.data(), c0.data());
        simd->matmul_bt(M, N, K, A.data(), Bt.data(), c1.data());
        for (size_t i = 0; i < c0.size(); ++i) CHECK(c1[i] == doctest::Approx(c0[i]).epsilon(1e-5));
    }

    for (size_t n : {1ul, 7ul, 8ul, 9ul, 31ul, 256ul, 1003ul}) {
        auto x = random_vec(n, rng);
        auto y0 = random_vec(n, rng);
        auto y1 = y0;

        std::vector<float> r0(n), r1(n);
        ref.relu_fwd(n, x.data(), r0.data());
        simd->relu_fwd(n, x.data(), r1.data());
        CHECK(r0 == r1);

        ref.relu_bwd(n, x.data(), y0.data(), r0.data());
        simd->relu_bwd(n, x.data(), y1.data(), r1.data());
        CHECK(r0 == r1);

        ref.axpy(n, 0.37f, x.data(), y0.data());
        simd->axpy(n, 0.37f, x.data(), y1.data());
        CHECK(y0 == y1);

        ref.scale(n, -1.25f, y0.data());
        simd->scale(n, -1.25f, y1.data());
        CHECK(y0 == y1);

        // adam: identical op order incl. sqrt/div, bit-exact
        auto w0 = random_vec(n, rng);
        auto w1 = w0;
        auto g = random_vec(n, rng);
        std::vector<float> m0(n, 0.1f), v0(n, 0.2f), m1 = m0, v1 = v0;
        ref.adam_step(n, w0.data(), g.data(), m0.data(), v0.data(), 0.001f, 0.9f, 0.999f, 1e-8f, 0.1f, 0.001999f);
        simd->adam_step(n, w1.data(), g.data(), m1.data(), v1.data(), 0.001f, 0.9f, 0.999f, 1e-8f, 0.1f, 0.001999f);
        CHECK(w0 == w1);
        CHECK(m0 == m1);
        CHECK(v0 == v1);

        const int rows = 5;
        const int cols = static_cast<int>(n);
        auto Y0 = random_vec(static_cast<size_t>(rows) * n, rng);
        auto Y1 = Y0;
        auto bias = random_vec(n, rng);
        ref.add_bias(rows, cols, Y0.data(), bias.data());
        simd->add_bias(rows, cols, Y1.data(), bias.data());
        CHECK(Y0 == Y1);

        std::vector<float> s0(n), s1(n);
        ref.col_sum(rows, cols, Y0.data(), s0.data());
        simd->col_sum(rows, cols, Y1.data(), s1.data());
        CHECK(s0 == s1);
    }
}

TEST_CASE("backend dispatch can be forced to scalar and back") {
    const kern::Backend before = kern::active_backend();
    kern::set_backend(kern::Backend::scalar);
    CHECK(kern::active_backend() == kern::Backend::scalar);
    std::vector<float> x{1.0f, -2.0f, 3.0f};
    std::vector<float> y(3, 0.0f);
    kern::axpy(3, 2.0f, x.data(), y.data());
    CHECK(y == std::vector<float>{2.0f, -4.0f, 6.0f});
    kern::set_backend(before);
    CHECK(kern::active_backend() == before);
}
