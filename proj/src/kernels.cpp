#include "sdd/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

#if defined(__x86_64__) || defined(_M_X64)
#define SDD_X86 1
#include <immintrin.h>
#endif
#if defined(__aarch64__) || defined(__ARM_NEON)
#define SDD_NEON 1
#include <arm_neon.h>
#endif

namespace sdd::kernels {

namespace ref {

double dot(const double* x, const double* y, std::size_t n) {
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += x[i] * y[i];
        s1 += x[i + 1] * y[i + 1];
        s2 += x[i + 2] * y[i + 2];
        s3 += x[i + 3] * y[i + 3];
    }
    for (; i < n; ++i) s0 += x[i] * y[i];
    return (s0 + s1) + (s2 + s3);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpay(const double* x, double a, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * y[i];
}

void sub(const double* x, const double* y, double* w, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) w[i] = x[i] - y[i];
}

void scal(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

}  // namespace ref

#if SDD_X86

__attribute__((target("avx2"))) static double dot_avx2(const double* x, const double* y,
                                                       std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
        acc1 = _mm256_add_pd(acc1,
                             _mm256_mul_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
    }
    double buf[4];
    _mm256_storeu_pd(buf, _mm256_add_pd(acc0, acc1));
    double s = (buf[0] + buf[1]) + (buf[2] + buf[3]);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

__attribute__((target("avx2"))) static void axpy_avx2(double a, const double* x, double* y,
                                                      std::size_t n) {
    __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

__attribute__((target("avx2"))) static void xpay_avx2(const double* x, double a, double* y,
                                                      std::size_t n) {
    __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_add_pd(_mm256_loadu_pd(x + i),
                                  _mm256_mul_pd(va, _mm256_loadu_pd(y + i)));
        _mm256_storeu_pd(y + i, v);
    }
    for (; i < n; ++i) y[i] = x[i] + a * y[i];
}

__attribute__((target("avx2"))) static void sub_avx2(const double* x, const double* y, double* w,
                                                     std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(w + i, _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) w[i] = x[i] - y[i];
}

__attribute__((target("avx2"))) static void scal_avx2(double a, double* x, std::size_t n) {
    __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) x[i] *= a;
}

#endif  // SDD_X86

#if SDD_NEON

static double dot_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0), acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
        acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
    }
    double s = vaddvq_f64(acc0) + vaddvq_f64(acc1);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

static void axpy_neon(double a, const double* x, double* y, std::size_t n) {
    float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vy = vld1q_f64(y + i);
        vy = vaddq_f64(vy, vmulq_f64(va, vld1q_f64(x + i)));
        vst1q_f64(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

static void xpay_neon(const double* x, double a, double* y, std::size_t n) {
    float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t v = vaddq_f64(vld1q_f64(x + i), vmulq_f64(va, vld1q_f64(y + i)));
        vst1q_f64(y + i, v);
    }
    for (; i < n; ++i) y[i] = x[i] + a * y[i];
}

static void sub_neon(const double* x, const double* y, double* w, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(w + i, vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    }
    for (; i < n; ++i) w[i] = x[i] - y[i];
}

static void scal_neon(double a, double* x, std::size_t n) {
    float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
    }
    for (; i < n; ++i) x[i] *= a;
}

#endif  // SDD_NEON

namespace {

struct Dispatch {
    double (*dot)(const double*, const double*, std::size_t) = ref::dot;
    void (*axpy)(double, const double*, double*, std::size_t) = ref::axpy;
    void (*xpay)(const double*, double, double*, std::size_t) = ref::xpay;
    void (*sub)(const double*, const double*, double*, std::size_t) = ref::sub;
    void (*scal)(double, double*, std::size_t) = ref::scal;
    const char* name = "scalar";
};

Dispatch pick() {
    Dispatch d;
    const char* env = std::getenv("SDD_KERNELS");
    bool force_scalar = env && std::strcmp(env, "scalar") == 0;
    if (force_scalar) return d;
#if SDD_X86
    if (__builtin_cpu_supports("avx2")) {
        d.dot = dot_avx2;
        d.axpy = axpy_avx2;
        d.xpay = xpay_avx2;
        d.sub = sub_avx2;
        d.scal = scal_avx2;
        d.name = "avx2";
    }
#elif SDD_NEON
    d.dot = dot_neon;
    d.axpy = axpy_neon;
    d.xpay = xpay_neon;
    d.sub = sub_neon;
    d.scal = scal_neon;
    d.name = "neon";
#endif
    return d;
}

const Dispatch& table() {
    static const Dispatch d = pick();
    return d;
}

}  // namespace

double dot(const double* x, const double* y, std::size_t n) { return table().dot(x, y, n); }
double nrm2(const double* x, std::size_t n) { return std::sqrt(table().dot(x, x, n)); }
void axpy(double a, const double* x, double* y, std::size_t n) { table().axpy(a, x, y, n); }
void xpay(const double* x, double a, double* y, std::size_t n) { table().xpay(x, a, y, n); }
void sub(const double* x, const double* y, double* w, std::size_t n) { table().sub(x, y, w, n); }
void scal(double a, double* x, std::size_t n) { table().scal(a, x, n); }

std::string active_variant() { return table().name; }

}  // namespace sdd::kernels
