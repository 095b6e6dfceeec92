#include "qscorr/kernels.hpp"

#include <omp.h>

#include "qscorr/errors.hpp"

namespace qsc {

namespace {

void check_equal(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InputError("sign counts: series differ in length");
}

void check_levels(std::span<const double> x, std::span<const double> y, std::size_t S) {
    check_equal(x, y);
    if (x.size() < 2) throw InputError("overlapping sign counts: need at least two levels");
    if (S < 1 || S > x.size() - 1) throw InputError("overlapping sign counts: need 1 <= S <= N");
}

}  // namespace

namespace serial {

SignCounts sign_counts(std::span<const double> x, std::span<const double> y) {
    check_equal(x, y);
    SignCounts c;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const int s = sign_product(x[i], y[i]);
        c.positive += s > 0;
        c.negative += s < 0;
        c.zero += s == 0;
    }
    return c;
}

SignCounts overlapping_sign_counts(std::span<const double> x, std::span<const double> y,
                                   std::size_t S) {
    check_levels(x, y, S);
    SignCounts c;
    for (std::size_t k = 0; k + S < x.size(); ++k) {
        const int s = sign_product(x[k + S] - x[k], y[k + S] - y[k]);
        c.positive += s > 0;
        c.negative += s < 0;
        c.zero += s == 0;
    }
    return c;
}

}  // namespace serial

namespace omp {

SignCounts sign_counts(std::span<const double> x, std::span<const double> y) {
    check_equal(x, y);
    const auto n = static_cast<std::int64_t>(x.size());
    std::int64_t pos = 0, neg = 0, zer = 0;
#pragma omp parallel for reduction(+ : pos, neg, zer) schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const int s = sign_product(x[i], y[i]);
        pos += s > 0;
        neg += s < 0;
        zer += s == 0;
    }
    return {pos, neg, zer};
}

SignCounts overlapping_sign_counts(std::span<const double> x, std::span<const double> y,
                                   std::size_t S) {
    check_levels(x, y, S);
    const auto count = static_cast<std::int64_t>(x.size() - S);
    const auto s_off = static_cast<std::int64_t>(S);
    std::int64_t pos = 0, neg = 0, zer = 0;
#pragma omp parallel for reduction(+ : pos, neg, zer) schedule(static)
    for (std::int64_t k = 0; k < count; ++k) {
        const int s = sign_product(x[k + s_off] - x[k], y[k + s_off] - y[k]);
        pos += s > 0;
        neg += s < 0;
        zer += s == 0;
    }
    return {pos, neg, zer};
}

}  // namespace omp

SignCounts sign_counts(std::span<const double> x, std::span<const double> y) {
    // Nested inside a replication loop the outer level already owns the threads.
    if (x.size() < kParallelThreshold || omp_in_parallel()) return serial::sign_counts(x, y);
    return omp::sign_counts(x, y);
}

SignCounts overlapping_sign_counts(std::span<const double> x, std::span<const double> y,
                                   std::size_t S) {
    if (x.size() < kParallelThreshold || omp_in_parallel())
        return serial::overlapping_sign_counts(x, y, S);
    return omp::overlapping_sign_counts(x, y, S);
}

void set_thread_count(int threads) {
    if (threads > 0) omp_set_num_threads(threads);
}

int thread_count() { return omp_get_max_threads(); }

}  // namespace qsc
