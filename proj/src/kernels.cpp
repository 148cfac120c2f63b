#include "equimesh/kernels.hpp"

#include <cassert>
#include <cmath>
#include <numbers>

#include "equimesh/lobachevsky.hpp"

namespace equimesh::kernels {
namespace {

constexpr double kPi = std::numbers::pi;

double lob_unchecked(double x) {
    const double r = std::remainder(x, kPi);
    return r < 0.0 ? -detail::lob_reduced(-r) : detail::lob_reduced(r);
}

double sum_lob_scalar(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += lob_unchecked(a[i]);
    return s;
}

void neg_log_2sin_scalar(const double* a, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = -std::log(2.0 * std::sin(a[i]));
}

void log_sin_scalar(const double* a, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::log(std::sin(a[i]));
}

void cot_scalar(const double* a, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::cos(a[i]) / std::sin(a[i]);
}

const KernelTable kScalarTable{
    sum_lob_scalar, neg_log_2sin_scalar, log_sin_scalar, cot_scalar, "scalar"};

}  // namespace

const KernelTable& scalar_kernels() { return kScalarTable; }

#if !defined(EQUIMESH_HAVE_AVX2)
const KernelTable* avx2_kernels() { return nullptr; }
#endif

const KernelTable& active_kernels() {
    static const KernelTable* selected = [] {
        if (const KernelTable* t = avx2_kernels()) return t;
        return &kScalarTable;
    }();
    return *selected;
}

double sum_lob(std::span<const double> a) {
    return active_kernels().sum_lob(a.data(), a.size());
}

void neg_log_2sin(std::span<const double> a, std::span<double> out) {
    assert(out.size() >= a.size());
    active_kernels().neg_log_2sin(a.data(), out.data(), a.size());
}

void log_sin(std::span<const double> a, std::span<double> out) {
    assert(out.size() >= a.size());
    active_kernels().log_sin(a.data(), out.data(), a.size());
}

void cot(std::span<const double> a, std::span<double> out) {
    assert(out.size() >= a.size());
    active_kernels().cot(a.data(), out.data(), a.size());
}

}  // namespace equimesh::kernels
