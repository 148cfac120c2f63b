#pragma once
#include <cstddef>
#include <span>
#include <string_view>

namespace equimesh::kernels {

// Batched elementwise kernels over corner-angle vectors. These back the
// energy/holonomy assembly, which evaluates them on all 3|F| angles at every
// solver iteration and line-search trial.
//
// Inputs are assumed to lie in the open interval (0, pi); the kernels do not
// check. All variants reduce in a fixed order, so results are reproducible
// run to run on the same machine.
//
// A scalar reference implementation always exists; an AVX2+FMA variant is
// selected at process start when the CPU supports it. The two are
// equivalence-tested against each other in the test suite.

struct KernelTable {
    double (*sum_lob)(const double* a, std::size_t n);                    // sum_i lob(a_i)
    void (*neg_log_2sin)(const double* a, double* out, std::size_t n);    // -ln(2 sin a_i)
    void (*log_sin)(const double* a, double* out, std::size_t n);         // ln(sin a_i)
    void (*cot)(const double* a, double* out, std::size_t n);             // cos a_i / sin a_i
    std::string_view name;
};

const KernelTable& scalar_kernels();

// Null when this build or CPU has no AVX2+FMA path.
const KernelTable* avx2_kernels();

// The table dispatch picked at startup (AVX2 when available).
const KernelTable& active_kernels();

// Convenience span wrappers over the active table.
double sum_lob(std::span<const double> a);
void neg_log_2sin(std::span<const double> a, std::span<double> out);
void log_sin(std::span<const double> a, std::span<double> out);
void cot(std::span<const double> a, std::span<double> out);

}  // namespace equimesh::kernels
