#pragma once

///
/// \file quadrature.hpp
///
/// Gauss-Legendre rules with Legendre-coefficient error rows, and a small
/// deterministic work-splitting helper.
///

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>
#include <vector>

#include "nblab/error.hpp"

namespace nblab {

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
/// `tail_rows[j]` holds (2m+1)/2 * w_k * P_m(x_k) for m = n-1-j, so that
/// dot(tail_rows[j], f) is the discrete Legendre coefficient c_m of f.
struct GaussLegendreRule {
    int n = 0;
    std::vector<double> nodes;
    std::vector<double> weights;
    std::array<std::vector<double>, 2> tail_rows;
};

namespace detail {

inline GaussLegendreRule compute_gauss_legendre(int n)
{
    GaussLegendreRule rule;
    rule.n = n;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const long double pi = std::numbers::pi_v<long double>;
    for (int i = 0; i < n; ++i) {
        long double x = std::cos(pi * (i + 0.75L) / (n + 0.5L));
        long double dp = 0.0L;
        for (int it = 0; it < 100; ++it) {
            long double p0 = 1.0L;
            long double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0L);
            const long double step = p1 / dp;
            x -= step;
            if (std::fabs(step) < 1e-19L)
                break;
        }
        // Node i is the (n-1-i)-th in ascending order.
        const auto k = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[k] = static_cast<double>(x);
        rule.weights[k] = static_cast<double>(2.0L / ((1.0L - x * x) * dp * dp));
    }
    for (int j = 0; j < 2; ++j) {
        const int m = n - 1 - j;
        auto& row = rule.tail_rows[static_cast<std::size_t>(j)];
        row.resize(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            const double x = rule.nodes[static_cast<std::size_t>(k)];
            double p0 = 1.0;
            double p1 = x;
            for (int q = 2; q <= m; ++q) {
                const double p2 = ((2 * q - 1) * x * p1 - (q - 1) * p0) / q;
                p0 = p1;
                p1 = p2;
            }
            const double pm = m == 0 ? 1.0 : p1;
            row[static_cast<std::size_t>(k)] = 0.5 * (2 * m + 1) * rule.weights[static_cast<std::size_t>(k)] * pm;
        }
    }
    return rule;
}

}  // namespace detail

/// Cached rule; n >= 2.
inline const GaussLegendreRule& gauss_legendre(int n)
{
    if (n < 2 || n > 256)
        throw Error(ErrorKind::InvalidArgument, "Gauss-Legendre order must be in [2, 256]");
    static std::mutex mutex;
    static std::map<int, GaussLegendreRule> cache;
    const std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, detail::compute_gauss_legendre(n)).first;
    return it->second;
}

/// Worker count: `requested` if positive, else the hardware concurrency.
inline unsigned resolve_threads(unsigned requested)
{
    if (requested > 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for every i < count across `threads` workers. Work items are
/// independent; callers that reduce must store per-item results and combine
/// them in index order, which keeps output independent of scheduling. The
/// exception from the lowest failing index is rethrown.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& fn)
{
    threads = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::size_t error_index = count;
    std::exception_ptr error;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                fn(i);
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

}  // namespace nblab
