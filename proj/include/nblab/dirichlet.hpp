#pragma once

///
/// \file dirichlet.hpp
///
/// Moebius sieve and real-coefficient Dirichlet polynomials
/// A(s) = sum_{n<=N} a_n n^{-s}, including the log-weighted mollifier
/// V_N(s) = sum_{n<=N} (1 - log n / log N) mu(n) n^{-s}.
///

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nblab/error.hpp"
#include "nblab/zeta.hpp"

namespace nblab {

/// Upper bound on sieve length (bytes of mu storage plus the prime list).
inline constexpr std::size_t kDefaultMoebiusLimit = std::size_t{1} << 28;

class MoebiusTable {
public:
    MoebiusTable() = default;

    std::size_t limit() const noexcept { return mu_.empty() ? 0 : mu_.size() - 1; }

    /// mu(n) for 1 <= n <= limit().
    int operator()(std::size_t n) const { return mu_.at(n); }

    /// Values indexed by n; entry 0 is unused and zero.
    std::span<const std::int8_t> values() const noexcept { return mu_; }

    /// Mertens function M(x) = sum_{n<=x} mu(n).
    std::int64_t mertens(std::size_t x) const
    {
        if (x > limit())
            throw Error(ErrorKind::InvalidArgument, "mertens argument beyond sieve limit");
        std::int64_t m = 0;
        for (std::size_t n = 1; n <= x; ++n)
            m += mu_[n];
        return m;
    }

private:
    friend MoebiusTable moebius_sieve(std::size_t, std::size_t);
    std::vector<std::int8_t> mu_;
};

/// Linear (Euler) sieve: every composite is crossed out exactly once by its
/// smallest prime factor.
inline MoebiusTable moebius_sieve(std::size_t n, std::size_t max_limit = kDefaultMoebiusLimit)
{
    if (n < 1)
        throw Error(ErrorKind::InvalidArgument, "moebius_sieve needs N >= 1");
    if (n > max_limit)
        throw Error(ErrorKind::ResourceLimit,
                    "sieve length " + std::to_string(n) + " exceeds the configured bound " + std::to_string(max_limit));
    MoebiusTable table;
    auto& mu = table.mu_;
    mu.assign(n + 1, 0);
    std::vector<bool> composite(n + 1, false);
    std::vector<std::uint32_t> primes;
    mu[1] = 1;
    for (std::size_t i = 2; i <= n; ++i) {
        if (!composite[i]) {
            primes.push_back(static_cast<std::uint32_t>(i));
            mu[i] = -1;
        }
        for (std::uint32_t p : primes) {
            const std::size_t ip = i * p;
            if (ip > n)
                break;
            composite[ip] = true;
            if (i % p == 0) {
                mu[ip] = 0;
                break;
            }
            mu[ip] = static_cast<std::int8_t>(-mu[i]);
        }
    }
    return table;
}

/// A(s) = sum_{n=1}^{N} a_n n^{-s} with real coefficients. Immutable.
class DirichletPoly {
public:
    /// coeffs[0] is a_1.
    explicit DirichletPoly(std::vector<double> coeffs) : coeffs_(std::move(coeffs))
    {
        if (coeffs_.empty())
            throw Error(ErrorKind::InvalidArgument, "Dirichlet polynomial needs length >= 1");
        log_n_.resize(coeffs_.size());
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (!std::isfinite(coeffs_[i]))
                throw Error(ErrorKind::InvalidArgument, "non-finite Dirichlet coefficient");
            log_n_[i] = std::log(static_cast<long double>(i + 1));
        }
    }

    std::size_t length() const noexcept { return coeffs_.size(); }

    /// a_n for 1 <= n <= length().
    double coeff(std::size_t n) const { return coeffs_.at(n - 1); }

    std::span<const double> coeffs() const noexcept { return coeffs_; }

    Complex operator()(Complex s) const
    {
        const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
        const long double t = s.imag();
        Complex sum = 0.0;
        for (std::size_t i = coeffs_.size(); i-- > 0;) {
            const double a = coeffs_[i];
            if (a == 0.0)
                continue;
            const long double ln = log_n_[i];
            const double magnitude = a * std::exp(-s.real() * static_cast<double>(ln));
            const auto phase = static_cast<double>(std::fmod(t * ln, two_pi));
            sum += std::polar(1.0, -phase) * magnitude;
        }
        return sum;
    }

    /// Same sum with n^{-s} supplied by the caller (powers[n], n >= 1), as
    /// produced by PowerSieve::fill.
    Complex evaluate_with_powers(std::span<const Complex> powers) const
    {
        if (powers.size() <= coeffs_.size())
            throw Error(ErrorKind::InvalidArgument, "power table shorter than the polynomial");
        Complex sum = 0.0;
        for (std::size_t i = coeffs_.size(); i-- > 0;)
            if (coeffs_[i] != 0.0)
                sum += coeffs_[i] * powers[i + 1];
        return sum;
    }

private:
    std::vector<double> coeffs_;
    std::vector<long double> log_n_;
};

inline Complex eval_poly(const DirichletPoly& p, Complex s) { return p(s); }

/// V_N with coefficients (1 - log n / log N) mu(n).
inline DirichletPoly build_VN(std::size_t n, const MoebiusTable& mu)
{
    if (n < 2)
        throw Error(ErrorKind::DegenerateLength, "V_N needs N >= 2 (log N must be positive)");
    if (mu.limit() < n)
        throw Error(ErrorKind::InvalidArgument, "Moebius table shorter than N");
    const double log_big = std::log(static_cast<double>(n));
    std::vector<double> coeffs(n);
    for (std::size_t k = 1; k <= n; ++k) {
        const int m = mu(k);
        coeffs[k - 1] = m == 0 ? 0.0 : (1.0 - std::log(static_cast<double>(k)) / log_big) * m;
    }
    return DirichletPoly(std::move(coeffs));
}

/// sum a_n^2 / n, the mean of |A(1/2+it)|^2 over long t-ranges.
inline double mean_square_weight(const DirichletPoly& p)
{
    double sum = 0.0;
    const auto c = p.coeffs();
    for (std::size_t i = c.size(); i-- > 0;)
        sum += c[i] * c[i] / static_cast<double>(i + 1);
    return sum;
}

}  // namespace nblab
