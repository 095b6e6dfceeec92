#pragma once

// Hot loops of the estimators, each in a serial reference form and an
// OpenMP form. Sign counts are integer reductions, so both forms return
// identical results for any thread count.

#include <cstddef>
#include <cstdint>
#include <span>

namespace qsc {

// sgn(x) * sgn(y) without forming the product (no underflow to zero).
inline int sign_product(double x, double y) {
    const int sx = (x > 0.0) - (x < 0.0);
    const int sy = (y > 0.0) - (y < 0.0);
    return sx * sy;
}

struct SignCounts {
    std::int64_t positive = 0;
    std::int64_t negative = 0;
    std::int64_t zero = 0;

    std::int64_t total() const { return positive + negative + zero; }
    std::int64_t net() const { return positive - negative; }
    std::int64_t nonzero() const { return positive + negative; }

    SignCounts& operator+=(const SignCounts& o) {
        positive += o.positive;
        negative += o.negative;
        zero += o.zero;
        return *this;
    }
    friend bool operator==(const SignCounts&, const SignCounts&) = default;
};

namespace serial {

SignCounts sign_counts(std::span<const double> x, std::span<const double> y);

// Sign counts of the overlapping span-S return products read directly from
// two level arrays of equal size N + 1 (no return grid is materialised).
SignCounts overlapping_sign_counts(std::span<const double> x, std::span<const double> y,
                                   std::size_t S);

}  // namespace serial

namespace omp {

SignCounts sign_counts(std::span<const double> x, std::span<const double> y);

SignCounts overlapping_sign_counts(std::span<const double> x, std::span<const double> y,
                                   std::size_t S);

}  // namespace omp

// Below this many products the parallel region costs more than it saves.
inline constexpr std::size_t kParallelThreshold = 1u << 16;

SignCounts sign_counts(std::span<const double> x, std::span<const double> y);
SignCounts overlapping_sign_counts(std::span<const double> x, std::span<const double> y,
                                   std::size_t S);

// Thread count used by the OpenMP kernels and replication loops.
void set_thread_count(int threads);
int thread_count();

}  // namespace qsc
