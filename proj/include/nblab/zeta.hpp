#pragma once

///
/// \file zeta.hpp
///
/// Riemann zeta function and its first two derivatives by Euler-Maclaurin
/// summation, the functional-equation factor chi(s), and the odd zeta values
/// used by the trivial-zero series.
///
/// Everything here is double precision. The documented working range is
/// |Im s| <= 1e6; beyond that the phase t*log(n) loses too many digits.
///

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "nblab/detail/bernoulli_table.hpp"
#include "nblab/error.hpp"

namespace nblab {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kEulerGamma = std::numbers::egamma;

/// Largest |Im s| accepted by the zeta routines.
inline constexpr double kMaxZetaHeight = 1.0e6;

struct EvalAccuracy {
    double abs_tol = 1e-12;
    std::int64_t max_terms = 20'000'000;

    void validate() const
    {
        if (!(abs_tol > 0.0) || !std::isfinite(abs_tol))
            throw Error(ErrorKind::InvalidArgument, "abs_tol must be positive and finite");
        if (max_terms < 16)
            throw Error(ErrorKind::InvalidArgument, "max_terms must be at least 16");
    }
};

inline bool is_finite(Complex z) noexcept
{
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

namespace detail {

/// x^{-s} for real x > 0. The phase t*log(x) is reduced in extended precision,
/// which keeps the error independent of the height t up to the documented range.
inline Complex real_power(double x, Complex s)
{
    const long double log_x = std::log(static_cast<long double>(x));
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    const long double phase = std::fmod(static_cast<long double>(s.imag()) * log_x, two_pi);
    const double magnitude = std::exp(-s.real() * static_cast<double>(log_x));
    return std::polar(magnitude, -static_cast<double>(phase));
}

}  // namespace detail

/// Fills n^{-s} for n = 1..N using multiplicativity: only primes need an exp,
/// composites are one complex product. Immutable after construction.
class PowerSieve {
public:
    explicit PowerSieve(std::size_t limit) : limit_(std::max<std::size_t>(limit, 2)), spf_(limit_ + 1, 0)
    {
        for (std::size_t i = 2; i <= limit_; ++i) {
            if (spf_[i] != 0)
                continue;
            for (std::size_t j = i; j <= limit_; j += i)
                if (spf_[j] == 0)
                    spf_[j] = static_cast<std::uint32_t>(i);
        }
    }

    std::size_t limit() const noexcept { return limit_; }

    /// out[n] = n^{-s} for 1 <= n < out.size(); out[0] is set to 0.
    void fill(Complex s, std::span<Complex> out) const
    {
        if (out.empty())
            return;
        if (out.size() > limit_ + 1)
            throw Error(ErrorKind::InvalidArgument, "PowerSieve too small for requested length");
        out[0] = 0.0;
        if (out.size() > 1)
            out[1] = 1.0;
        for (std::size_t n = 2; n < out.size(); ++n) {
            const std::uint32_t p = spf_[n];
            if (p == n)
                out[n] = detail::real_power(static_cast<double>(n), s);
            else
                out[n] = out[p] * out[n / p];
        }
    }

private:
    std::size_t limit_;
    std::vector<std::uint32_t> spf_;
};

namespace detail {

/// Truncated Taylor jet (f, f', f'') of a function of s.
struct Jet {
    Complex v{};
    Complex d1{};
    Complex d2{};

    Jet& operator+=(const Jet& o)
    {
        v += o.v;
        d1 += o.d1;
        d2 += o.d2;
        return *this;
    }
};

inline Jet operator*(const Jet& a, const Jet& b)
{
    return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}

inline Jet operator*(Complex c, const Jet& a) { return {c * a.v, c * a.d1, c * a.d2}; }

inline double jet_magnitude(const Jet& a, int order)
{
    double m = std::abs(a.v);
    if (order >= 1)
        m = std::max(m, std::abs(a.d1));
    if (order >= 2)
        m = std::max(m, std::abs(a.d2));
    return m;
}

/// Jet of x^{-s} = exp(-s log x) for fixed x > 0.
inline Jet power_jet(double x, Complex s)
{
    const double log_x = std::log(x);
    const Complex e = real_power(x, s);
    return {e, -log_x * e, log_x * log_x * e};
}

/// Result of the Euler-Maclaurin remainder part: everything except the
/// direct sum over n < cutoff.
struct EulerMaclaurinTail {
    Jet value;
    std::int64_t cutoff = 0;  // direct sum runs over 1 <= n < cutoff
    int bernoulli_terms = 0;
    double truncation_bound = 0.0;
};

/// Tail of Euler-Maclaurin at a given cutoff. Returns false in `ok` when the
/// asymptotic terms never fall below `tol` at this cutoff.
inline EulerMaclaurinTail euler_maclaurin_tail(Complex s, std::int64_t cutoff, int order, double tol, bool& ok)
{
    const double n = static_cast<double>(cutoff);
    const Jet base = power_jet(n, s);  // N^{-s}
    const Complex u = 1.0 / (s - 1.0);
    const Jet inv_s_minus_1{u, -u * u, 2.0 * u * u * u};

    EulerMaclaurinTail out;
    out.cutoff = cutoff;
    out.value = n * (base * inv_s_minus_1);
    out.value += Complex(0.5) * base;

    // q_k = prod_{j=0}^{2k-2} (s+j) * N^{1-2k}, kept scaled to avoid overflow.
    Jet q{s / n, Complex(1.0 / n), Complex(0.0)};
    const double inv_n2 = 1.0 / (n * n);
    const double sigma = s.real();
    double previous = std::numeric_limits<double>::infinity();
    const int kmax = static_cast<int>(kBernoulliOverFactorial.size());
    ok = false;
    for (int k = 1; k <= kmax; ++k) {
        if (k > 1) {
            const double a = 2.0 * k - 3.0;
            const double b = 2.0 * k - 2.0;
            const Jet factor{(s + a) * (s + b) * inv_n2, (2.0 * s + a + b) * inv_n2, Complex(2.0 * inv_n2)};
            q = q * factor;
        }
        const Jet term = kBernoulliOverFactorial[static_cast<std::size_t>(k - 1)] * (q * base);
        const double magnitude = jet_magnitude(term, order);
        const double denom = sigma + 2.0 * k - 1.0;
        if (denom > 0.0) {
            // |R| <= |s+2k-1| / (sigma+2k-1) * |T_k| once the terms decrease.
            const double bound = magnitude * std::abs(s + (2.0 * k - 1.0)) / denom;
            if (bound <= tol) {
                out.bernoulli_terms = k - 1;
                out.truncation_bound = bound;
                ok = true;
                return out;
            }
            if (magnitude > previous && k > 2)
                return out;  // asymptotic series has started to diverge
        }
        previous = magnitude;
        out.value += term;
    }
    return out;
}

inline void check_zeta_argument(Complex s)
{
    if (!is_finite(s))
        throw Error(ErrorKind::DomainError, "non-finite argument");
    if (s == Complex(1.0, 0.0))
        throw Error(ErrorKind::PoleAtOne, "zeta has a simple pole at s = 1");
    if (std::abs(s.imag()) > kMaxZetaHeight)
        throw Error(ErrorKind::DomainError, "|Im s| exceeds the supported height 1e6");
}

/// Choose the Euler-Maclaurin cutoff for s and compute the asymptotic tail.
inline EulerMaclaurinTail plan_euler_maclaurin(Complex s, int order, const EvalAccuracy& acc)
{
    acc.validate();
    check_zeta_argument(s);
    // The direct-sum error and the tail bound share the tolerance budget.
    const double tol = 0.5 * acc.abs_tol;
    double start = std::max(8.0, std::ceil(1.3 * std::abs(s) / kTwoPi) + 2.0);
    // Far to the left the Bernoulli terms only settle once 2k exceeds -sigma.
    start = std::max(start, std::ceil(-s.real() / kPi) + 8.0);
    auto cutoff = static_cast<std::int64_t>(start);
    while (cutoff <= acc.max_terms) {
        bool ok = false;
        EulerMaclaurinTail tail = euler_maclaurin_tail(s, cutoff, order, tol, ok);
        if (ok)
            return tail;
        cutoff = cutoff + cutoff / 4 + 1;
    }
    throw Error(ErrorKind::AccuracyUnreachable,
                "Euler-Maclaurin needs more than max_terms terms at this height and tolerance");
}

inline Jet direct_sum(Complex s, std::int64_t cutoff, int order)
{
    const auto count = static_cast<std::size_t>(cutoff);
    const PowerSieve sieve(count);
    std::vector<Complex> powers(count);
    sieve.fill(s, powers);
    Jet sum{};
    // Smallest terms first.
    for (std::size_t n = count; n-- > 1;) {
        const Complex e = powers[n];
        sum.v += e;
        if (order >= 1) {
            const double ln = std::log(static_cast<double>(n));
            sum.d1 -= ln * e;
            if (order >= 2)
                sum.d2 += ln * ln * e;
        }
    }
    return sum;
}

/// Rough size of accumulated rounding in the direct sum: one ulp of
/// sum_{n<N} n^{-sigma} log^j(n).
inline double direct_sum_roundoff(Complex s, std::int64_t cutoff, int order)
{
    const double n = static_cast<double>(cutoff);
    const double sigma = s.real();
    const double mass = std::abs(sigma - 1.0) < 1e-9 ? std::log(n) + 1.0
                                                      : (std::pow(n, 1.0 - sigma) - 1.0) / (1.0 - sigma) + 1.0;
    const double log_weight = std::pow(std::max(1.0, std::log(n)), order);
    return std::numeric_limits<double>::epsilon() * mass * log_weight;
}

inline void check_roundoff(Complex s, std::int64_t cutoff, int order, const EvalAccuracy& acc)
{
    if (direct_sum_roundoff(s, cutoff, order) > acc.abs_tol)
        throw Error(ErrorKind::AccuracyUnreachable,
                    "rounding in the Euler-Maclaurin sum exceeds the requested tolerance");
}

}  // namespace detail

/// zeta(s) together with its first `order` derivatives (order in {0, 1, 2}).
/// Entry j of the result is zeta^(j)(s); entries above `order` are zero.
inline std::array<Complex, 3> zeta_jet(Complex s, int order, const EvalAccuracy& acc = {})
{
    if (order < 0 || order > 2)
        throw Error(ErrorKind::InvalidArgument, "derivative order must be 0, 1 or 2");
    const detail::EulerMaclaurinTail tail = detail::plan_euler_maclaurin(s, order, acc);
    detail::check_roundoff(s, tail.cutoff, order, acc);
    detail::Jet total = detail::direct_sum(s, tail.cutoff, order);
    total += tail.value;
    std::array<Complex, 3> out{total.v, order >= 1 ? total.d1 : Complex(), order >= 2 ? total.d2 : Complex()};
    return out;
}

inline Complex zeta(Complex s, const EvalAccuracy& acc = {})
{
    return zeta_jet(s, 0, acc)[0];
}

inline Complex zeta_deriv(Complex s, int order, const EvalAccuracy& acc = {})
{
    if (order != 1 && order != 2)
        throw Error(ErrorKind::InvalidArgument, "zeta_deriv order must be 1 or 2");
    return zeta_jet(s, order, acc)[static_cast<std::size_t>(order)];
}

/// zeta(s) using a caller-provided sieve for the direct sum. `scratch` is
/// resized as needed; the result equals zeta(s, acc) up to roundoff.
inline Complex zeta_with_sieve(Complex s, const PowerSieve& sieve, std::vector<Complex>& scratch, const EvalAccuracy& acc)
{
    const detail::EulerMaclaurinTail tail = detail::plan_euler_maclaurin(s, 0, acc);
    detail::check_roundoff(s, tail.cutoff, 0, acc);
    const auto cutoff = static_cast<std::size_t>(tail.cutoff);
    if (cutoff > sieve.limit() + 1)
        return detail::direct_sum(s, tail.cutoff, 0).v + tail.value.v;
    scratch.resize(cutoff);
    sieve.fill(s, scratch);
    Complex sum = 0.0;
    for (std::size_t n = cutoff; n-- > 1;)
        sum += scratch[n];
    return sum + tail.value.v;
}

// ---------------------------------------------------------------------------
// Gamma-type functions for chi(s).

namespace detail {

inline constexpr std::array<double, 10> kStirlingCoefficients{
    1.0 / 12.0,          -1.0 / 360.0,          1.0 / 1260.0,      -1.0 / 1680.0,       1.0 / 1188.0,
    -691.0 / 360360.0,   1.0 / 156.0,           -3617.0 / 122400.0, 43867.0 / 244188.0, -174611.0 / 125400.0,
};

inline bool near_nonpositive_integer(Complex z)
{
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real());
}

/// exp of this differs from Gamma(z) by nothing; the branch of the imaginary
/// part is not the principal log-gamma branch.
inline Complex log_gamma_any_branch(Complex z)
{
    if (near_nonpositive_integer(z))
        throw Error(ErrorKind::DomainError, "Gamma has a pole at nonpositive integers");
    Complex shift = 0.0;
    while (std::abs(z) < 15.0 || z.real() < 10.0) {
        shift += std::log(z);
        z += 1.0;
    }
    const Complex inv = 1.0 / z;
    const Complex inv2 = inv * inv;
    Complex series = 0.0;
    Complex p = inv;
    for (double c : kStirlingCoefficients) {
        series += c * p;
        p *= inv2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(kTwoPi) + series - shift;
}

/// log(sin z) up to a multiple of 2*pi*i, stable for large |Im z|.
inline Complex log_sin(Complex z)
{
    const Complex i(0.0, 1.0);
    if (z.imag() > 0.0) {
        // sin z = e^{-iz} (e^{2iz} - 1) / (2i)
        return -i * z + std::log(std::exp(2.0 * i * z) - 1.0) - std::log(2.0 * i);
    }
    if (z.imag() < 0.0) {
        // sin z = e^{iz} (1 - e^{-2iz}) / (2i)
        return i * z + std::log(1.0 - std::exp(-2.0 * i * z)) - std::log(2.0 * i);
    }
    return std::log(Complex(std::sin(z.real())));
}

inline Complex cot_stable(Complex z)
{
    const Complex i(0.0, 1.0);
    if (z.imag() > 0.0) {
        const Complex e = std::exp(2.0 * i * z);
        return i * (e + 1.0) / (e - 1.0);
    }
    if (z.imag() < 0.0) {
        const Complex e = std::exp(-2.0 * i * z);
        return i * (1.0 + e) / (1.0 - e);
    }
    return Complex(std::cos(z.real()) / std::sin(z.real()));
}

}  // namespace detail

inline Complex digamma(Complex z)
{
    if (detail::near_nonpositive_integer(z))
        throw Error(ErrorKind::DomainError, "digamma has a pole at nonpositive integers");
    Complex shift = 0.0;
    while (std::abs(z) < 15.0 || z.real() < 10.0) {
        shift += 1.0 / z;
        z += 1.0;
    }
    // psi(z) ~ log z - 1/(2z) - sum B_{2k} / (2k z^{2k})
    static constexpr std::array<double, 8> b2k_over_2k{
        1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0, 1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0, -3617.0 / 8160.0,
    };
    const Complex inv2 = 1.0 / (z * z);
    Complex p = inv2;
    Complex series = 0.0;
    for (double c : b2k_over_2k) {
        series += c * p;
        p *= inv2;
    }
    return std::log(z) - 0.5 / z - series - shift;
}

namespace detail {

inline void check_chi_argument(Complex s)
{
    if (!is_finite(s))
        throw Error(ErrorKind::DomainError, "non-finite argument");
    if (s.imag() == 0.0 && s.real() == std::round(s.real())) {
        const double r = s.real();
        const bool sin_zero = std::fmod(std::abs(r), 2.0) == 0.0;
        const bool gamma_pole = r >= 1.0;
        if (sin_zero || gamma_pole)
            throw Error(ErrorKind::DomainError, "chi has a singular factor at this integer");
    }
}

}  // namespace detail

/// chi(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s), so that zeta(s) = chi(s) zeta(1-s).
inline Complex chi(Complex s)
{
    detail::check_chi_argument(s);
    const Complex log_chi = s * std::log(2.0) + (s - 1.0) * std::log(kPi) + detail::log_sin(0.5 * kPi * s) +
                            detail::log_gamma_any_branch(1.0 - s);
    return std::exp(log_chi);
}

/// chi'/chi(s) = log(2 pi) + (pi/2) cot(pi s/2) - psi(1-s).
inline Complex chi_log_deriv(Complex s)
{
    detail::check_chi_argument(s);
    return std::log(kTwoPi) + 0.5 * kPi * detail::cot_stable(0.5 * kPi * s) - digamma(1.0 - s);
}

/// zeta(2n+1) from the Dirichlet series summed to K-1, closed by the
/// integral and midpoint corrections; K is chosen so that the first
/// neglected Euler-Maclaurin term p K^{-p-1}/12 is below abs_tol.
inline double zeta_odd(int n, const EvalAccuracy& acc = {})
{
    acc.validate();
    if (n < 1)
        throw Error(ErrorKind::InvalidArgument, "zeta_odd needs n >= 1");
    const double p = 2.0 * n + 1.0;
    const double k_needed = std::pow(p / (12.0 * acc.abs_tol), 1.0 / (p + 1.0));
    const auto k = static_cast<std::int64_t>(std::max(4.0, std::ceil(k_needed)));
    if (k > acc.max_terms)
        throw Error(ErrorKind::AccuracyUnreachable, "zeta_odd tolerance needs too many terms");
    double sum = 0.0;
    // Smallest terms first.
    for (std::int64_t m = k - 1; m >= 1; --m)
        sum += std::pow(static_cast<double>(m), -p);
    const double kd = static_cast<double>(k);
    sum += std::pow(kd, 1.0 - p) / (p - 1.0) + 0.5 * std::pow(kd, -p);
    return sum;
}

}  // namespace nblab
