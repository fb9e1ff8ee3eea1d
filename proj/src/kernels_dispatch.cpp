#include "camel/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "camel/errors.hpp"

namespace camel::kern {

namespace {

KernelTable make_scalar_table() {
    KernelTable t;
    t.matmul = &scalar::matmul<float>;
    t.matmul_at = &scalar::matmul_at<float>;
    t.matmul_bt = &scalar::matmul_bt<float>;
    t.add_bias = &scalar::add_bias<float>;
    t.col_sum = &scalar::col_sum<float>;
    t.relu_fwd = &scalar::relu_fwd<float>;
    t.relu_bwd = &scalar::relu_bwd<float>;
    t.axpy = &scalar::axpy<float>;
    t.scale = &scalar::scale<float>;
    t.adam_step = &scalar::adam_step<float>;
    return t;
}

struct Dispatch {
    KernelTable scalar_t;
    const KernelTable* avx2_t = nullptr;
    const KernelTable* active = nullptr;
    Backend backend = Backend::scalar;

    Dispatch() {
        scalar_t = make_scalar_table();
        avx2_t = avx2_table();
        backend = Backend::scalar;
        active = &scalar_t;
        if (avx2_t != nullptr && cpu_has_avx2()) {
            backend = Backend::avx2;
            active = avx2_t;
        }
        if (const char* env = std::getenv("CAMEL_KERNELS")) {
            if (std::strcmp(env, "scalar") == 0) {
                backend = Backend::scalar;
                active = &scalar_t;
            } else if (std::strcmp(env, "avx2") == 0 && avx2_t != nullptr && cpu_has_avx2()) {
                backend = Backend::avx2;
                active = avx2_t;
            }
        }
    }
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

}  // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable& table() { return *dispatch().active; }

const KernelTable& scalar_table() { return dispatch().scalar_t; }

Backend active_backend() { return dispatch().backend; }

void set_backend(Backend b) {
    Dispatch& d = dispatch();
    if (b == Backend::avx2) {
        if (d.avx2_t == nullptr || !cpu_has_avx2()) throw InputError("kernels: avx2 backend unavailable");
        d.backend = Backend::avx2;
        d.active = d.avx2_t;
    } else {
        d.backend = Backend::scalar;
        d.active = &d.scalar_t;
    }
}

std::string backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

}  // namespace camel::kern
