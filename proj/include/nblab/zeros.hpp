#pragma once

///
/// \file zeros.hpp
///
/// Tables of nontrivial zeros rho = 1/2 + i gamma: ingestion with
/// verification, zeta'(rho), sums over zeros, and the exact expansion
///
///   V_N(s) = (1/zeta)(1 - (1/log N) zeta'/zeta) + (1/log N) sum_rho R_N(rho, s)
///            + (1/log N) F_s(1/N),
///
/// with R_N(rho, s) = N^{rho-s} / (zeta'(rho) (rho-s)^2) for simple zeros.
///

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nblab/dirichlet.hpp"
#include "nblab/error.hpp"
#include "nblab/quadrature.hpp"
#include "nblab/zeta.hpp"

namespace nblab {

struct ZeroRecord {
    double gamma = 0.0;
    Complex zeta_prime{};
    int multiplicity = 1;

    Complex rho() const noexcept { return {0.5, gamma}; }
};

/// Main term of the zero-counting function, T/2pi log(T/(2 pi e)).
inline double counting_main_term(double t)
{
    return t / kTwoPi * std::log(t / (kTwoPi * std::numbers::e));
}

/// Allowed |count - main term| at height T.
inline double counting_tolerance(double t)
{
    return 5.0 + 2.0 * std::log(std::max(t, 1.0));
}

/// Ascending zero records with the largest trusted height t_cap. Immutable.
class ZeroTable {
public:
    ZeroTable() = default;

    ZeroTable(std::vector<ZeroRecord> records, std::string source, double t_cap = std::numeric_limits<double>::quiet_NaN())
        : records_(std::move(records)), source_(std::move(source))
    {
        for (std::size_t i = 0; i < records_.size(); ++i) {
            if (!(records_[i].gamma > 0.0) || !std::isfinite(records_[i].gamma))
                throw Error(ErrorKind::InvalidArgument, "zero ordinates must be positive and finite");
            if (i > 0 && !(records_[i].gamma > records_[i - 1].gamma))
                throw Error(ErrorKind::InvalidArgument, "zero ordinates must be strictly ascending");
            if (records_[i].multiplicity < 1)
                throw Error(ErrorKind::InvalidArgument, "multiplicity must be >= 1");
        }
        const double last = records_.empty() ? 0.0 : records_.back().gamma;
        t_cap_ = std::isnan(t_cap) ? last : t_cap;
        if (t_cap_ < 0.0)
            throw Error(ErrorKind::InvalidArgument, "t_cap must be non-negative");
        // Records above the cap are not trusted and not kept.
        while (!records_.empty() && records_.back().gamma > t_cap_)
            records_.pop_back();
    }

    std::span<const ZeroRecord> records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    const std::string& source() const noexcept { return source_; }
    double t_cap() const noexcept { return t_cap_; }

    /// Number of zeros with 0 < gamma <= T.
    std::size_t count_below(double t) const
    {
        const auto it = std::upper_bound(records_.begin(), records_.end(), t,
                                         [](double v, const ZeroRecord& r) { return v < r.gamma; });
        return static_cast<std::size_t>(it - records_.begin());
    }

    /// Records with gamma <= T; T must not exceed t_cap.
    std::span<const ZeroRecord> up_to(double t) const
    {
        if (t > t_cap_)
            throw Error(ErrorKind::InvalidArgument,
                        "height " + std::to_string(t) + " exceeds the table's trusted height " + std::to_string(t_cap_));
        return std::span<const ZeroRecord>(records_).first(count_below(t));
    }

    /// max over prefix heights of |count - main term| - tolerance; <= 0 when
    /// the table is consistent with the counting function up to t_cap.
    double counting_excess() const
    {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < records_.size(); ++i) {
            const double t = records_[i].gamma;
            const double main = counting_main_term(t);
            const double tol = counting_tolerance(t);
            // Just below and at the ordinate.
            worst = std::max(worst, std::abs(static_cast<double>(i) - main) - tol);
            worst = std::max(worst, std::abs(static_cast<double>(i + 1) - main) - tol);
        }
        return worst;
    }

private:
    std::vector<ZeroRecord> records_;
    std::string source_;
    double t_cap_ = 0.0;
};

struct LoadOptions {
    bool verify = true;
    double verify_tolerance = 1e-6;
    double t_cap = std::numeric_limits<double>::quiet_NaN();  // NaN: last ordinate
    EvalAccuracy acc{};
    unsigned threads = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace detail

/// Parses ordinates and computes zeta(rho), zeta'(rho) for each. With
/// `verify`, every |zeta(rho)| must be below the tolerance and the counts
/// must track the counting main term.
inline ZeroTable parse_zero_table(std::istream& in, const std::string& source, const LoadOptions& opt = {})
{
    std::vector<ZeroRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = detail::trim(line);
        if (text.empty() || text.front() == '#')
            continue;
        double gamma = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), gamma);
        if (ec != std::errc() || ptr != text.data() + text.size())
            throw ParseError("not a decimal ordinate: '" + std::string(text) + "'", line_no);
        if (!(gamma > 0.0) || !std::isfinite(gamma))
            throw ParseError("ordinate must be positive and finite", line_no);
        if (!records.empty() && !(gamma > records.back().gamma))
            throw ParseError("ordering: ordinates must be strictly ascending", line_no);
        records.push_back({gamma, {}, 1});
    }
    if (records.empty())
        throw ParseError("no ordinates found", line_no);

    std::vector<double> residual(records.size());
    parallel_for(records.size(), opt.threads, [&](std::size_t i) {
        const auto jet = zeta_jet(records[i].rho(), 1, opt.acc);
        residual[i] = std::abs(jet[0]);
        records[i].zeta_prime = jet[1];
    });

    ZeroTable table(std::move(records), source, opt.t_cap);
    if (opt.verify) {
        std::string offenders;
        std::size_t bad = 0;
        for (std::size_t i = 0; i < table.size(); ++i)
            if (!(residual[i] < opt.verify_tolerance)) {
                if (++bad <= 10)
                    offenders += (offenders.empty() ? "" : ", ") + std::to_string(table.records()[i].gamma);
            }
        if (bad > 0)
            throw Error(ErrorKind::VerificationFailure,
                        std::to_string(bad) + " ordinate(s) with |zeta(rho)| >= tolerance: " + offenders);
        const double excess = table.counting_excess();
        if (excess > 0.0)
            throw Error(ErrorKind::VerificationFailure,
                        "zero counts depart from T/2pi log(T/2pi e) by more than 5 + 2 log T (table incomplete?)");
    }
    return table;
}

inline ZeroTable load_zeros(const std::string& path, const LoadOptions& opt = {})
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::InvalidArgument, "cannot open zero table '" + path + "'");
    return parse_zero_table(in, path, opt);
}

namespace detail {

inline void require_simple(std::span<const ZeroRecord> zeros)
{
    for (const auto& z : zeros)
        if (z.multiplicity != 1)
            throw Error(ErrorKind::MultipleRoot,
                        "zero at gamma = " + std::to_string(z.gamma) + " has multiplicity > 1; 1/zeta'(rho) is undefined");
}

}  // namespace detail

/// sum_{0 < gamma <= T} 1/|zeta'(rho)|^2 (one-sided; the sum over gamma and
/// -gamma is twice this).
inline double sum_inv_zeta_prime_sq(const ZeroTable& table, double t)
{
    const auto zeros = table.up_to(t);
    detail::require_simple(zeros);
    double sum = 0.0;
    for (std::size_t i = zeros.size(); i-- > 0;)
        sum += 1.0 / std::norm(zeros[i].zeta_prime);
    return sum;
}

/// Least-squares slope of log(sum_inv_zeta_prime_sq) against log T on
/// `points` log-spaced heights in [t_lo, t_hi].
inline double zeta_prime_exponent_fit(const ZeroTable& table, double t_lo, double t_hi, int points = 40)
{
    if (!(t_lo > 0.0) || !(t_hi > t_lo) || points < 2)
        throw Error(ErrorKind::InvalidArgument, "exponent fit needs 0 < t_lo < t_hi and >= 2 points");
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (int k = 0; k < points; ++k) {
        const double t = t_lo * std::pow(t_hi / t_lo, static_cast<double>(k) / (points - 1));
        const double value = sum_inv_zeta_prime_sq(table, t);
        if (!(value > 0.0))
            throw Error(ErrorKind::InvalidArgument, "exponent fit range starts below the first zero");
        const double x = std::log(t);
        const double y = std::log(value);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = points;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct InvRhoSum {
    double partial = 0.0;  // sum_{|gamma| <= T} 1/|rho|^2, both half-planes
    double tail = 0.0;     // (log(T/2pi) + 1)/(pi T)

    double total() const noexcept { return partial + tail; }
};

inline InvRhoSum sum_inv_rho_sq(const ZeroTable& table, double t)
{
    const auto zeros = table.up_to(t);
    InvRhoSum out;
    for (std::size_t i = zeros.size(); i-- > 0;)
        out.partial += 2.0 * zeros[i].multiplicity / (0.25 + zeros[i].gamma * zeros[i].gamma);
    const double tt = std::max(t, kTwoPi);
    out.tail = (std::log(tt / kTwoPi) + 1.0) / (kPi * tt);
    return out;
}

/// F_s(z) = (1/pi) z^s sum_{n>=1} (-1)^n (2pi)^{2n+1} z^{2n} / ((2n)! zeta(2n+1) (2n+s)^2),
/// the contribution of the trivial zeros -2n; 1/pi comes from
/// 1/zeta'(-2n) = (2pi)^{2n+1} / ((-1)^n pi (2n)! zeta(2n+1)).
inline Complex f_series(Complex s, double z, const EvalAccuracy& acc = {})
{
    if (!(z >= 0.0) || !std::isfinite(z) || !is_finite(s))
        throw Error(ErrorKind::InvalidArgument, "f_series needs finite s and z >= 0");
    if (s.imag() == 0.0 && s.real() < 0.0 && std::abs(s.real() / 2.0 - std::round(s.real() / 2.0)) == 0.0)
        throw Error(ErrorKind::DomainError, "F_s has a double pole at s = -2n");
    if (z == 0.0) {
        if (s.real() > 0.0)
            return 0.0;
        throw Error(ErrorKind::DomainError, "z^s at z = 0 needs Re s > 0");
    }
    const double x = kTwoPi * z;
    // power = (2pi)^{2n+1} z^{2n} / (2n)!, updated by x^2 / ((2n)(2n-1)).
    double power = kTwoPi;
    Complex sum = 0.0;
    double largest = 0.0;
    for (int n = 1; n < 400; ++n) {
        power *= x * x / ((2.0 * n) * (2.0 * n - 1.0));
        const double zeta_odd_value = n < 30 ? zeta_odd(n) : 1.0 + std::ldexp(1.0, -(2 * n + 1));
        const Complex denom = (2.0 * n + s) * (2.0 * n + s);
        const Complex term = (n % 2 == 1 ? -power : power) / (zeta_odd_value * denom);
        sum += term;
        largest = std::max(largest, std::abs(term));
        if (2.0 * n > x && std::abs(term) < 1e-16 * std::abs(sum))
            break;
    }
    if (largest * std::numeric_limits<double>::epsilon() > acc.abs_tol)
        throw Error(ErrorKind::AccuracyUnreachable, "F_s series cancels too severely at this z");
    return std::exp(s * std::log(z)) * sum / kPi;
}

/// N^{rho-s} / (zeta'(rho) (rho-s)^2) for a simple zero rho.
inline Complex r_term(Complex rho, Complex zeta_prime, Complex s, std::size_t n)
{
    const Complex gap = rho - s;
    if (std::abs(gap) < 1e-12)
        throw Error(ErrorKind::SingularAtZero, "s coincides with a zero of zeta");
    if (n < 1)
        throw Error(ErrorKind::InvalidArgument, "N must be >= 1");
    return std::exp(gap * std::log(static_cast<double>(n))) / (zeta_prime * gap * gap);
}

/// R_N at the zero in the upper half-plane, or at its conjugate.
inline Complex r_term(const ZeroRecord& zero, Complex s, std::size_t n, bool conjugate = false)
{
    if (zero.multiplicity != 1)
        throw Error(ErrorKind::MultipleRoot, "r_term needs a simple zero");
    return conjugate ? r_term(std::conj(zero.rho()), std::conj(zero.zeta_prime), s, n)
                     : r_term(zero.rho(), zero.zeta_prime, s, n);
}

/// sum over |gamma| <= T of R_N(rho, s), both half-planes.
inline Complex sum_r_terms(std::span<const ZeroRecord> zeros, Complex s, std::size_t n)
{
    detail::require_simple(zeros);
    Complex sum = 0.0;
    for (std::size_t i = zeros.size(); i-- > 0;)
        sum += r_term(zeros[i], s, n, false) + r_term(zeros[i], s, n, true);
    return sum;
}

/// Mean-density estimate of sum_{|gamma| > T} |R_N(rho, s)|: zeros above T
/// have density log(t/2pi)/2pi and 1/|zeta'| is replaced by its mean over
/// the table's zeros in [T/2, T].
inline double r_tail_estimate(const ZeroTable& table, Complex s, std::size_t n, double t)
{
    const auto zeros = table.up_to(t);
    double inv_mean = 0.0;
    std::size_t count = 0;
    for (const auto& z : zeros)
        if (z.gamma >= 0.5 * t) {
            inv_mean += 1.0 / std::abs(z.zeta_prime);
            ++count;
        }
    if (count == 0)
        throw Error(ErrorKind::InvalidArgument, "no zeros in [T/2, T] to estimate the tail");
    inv_mean /= static_cast<double>(count);
    // int_T^inf log(t/2pi) / (t - a)^2 dt for a < T.
    auto kernel = [&](double a) {
        const double head = std::log(t / kTwoPi) / (t - a);
        const double rest = std::abs(a) < 1e-12 ? 1.0 / t : std::log(t / (t - a)) / a;
        return head + rest;
    };
    const double ts = s.imag();
    if (!(t > std::abs(ts)))
        throw Error(ErrorKind::InvalidArgument, "tail estimate needs T above |Im s|");
    const double damping = std::pow(static_cast<double>(n), 0.5 - s.real());
    return damping * inv_mean / kTwoPi * (kernel(ts) + kernel(-ts));
}

struct Lemma31Result {
    Complex lhs;  // V_N(s)
    Complex rhs;  // truncated expansion
    double residual = 0.0;
    double truncation_estimate = 0.0;
    std::size_t zeros_used = 0;
    bool pass = false;  // residual <= truncation_estimate
};

inline Lemma31Result lemma31_residual(std::size_t n, Complex s, double t, const ZeroTable& table,
                                      const EvalAccuracy& acc = {})
{
    if (!(s.real() > 0.0 && s.real() < 1.0))
        throw Error(ErrorKind::DomainError, "the expansion holds for 0 < Re s < 1");
    const MoebiusTable mu = moebius_sieve(n);
    const DirichletPoly v = build_VN(n, mu);
    const auto jet = zeta_jet(s, 1, acc);
    if (std::abs(jet[0]) < 1e-10)
        throw Error(ErrorKind::SingularAtZero, "s is (numerically) a zero of zeta");
    const auto zeros = table.up_to(t);
    const double log_n = std::log(static_cast<double>(n));

    Lemma31Result out;
    out.lhs = v(s);
    out.rhs = (1.0 - jet[1] / (jet[0] * log_n)) / jet[0] + sum_r_terms(zeros, s, n) / log_n +
              f_series(s, 1.0 / static_cast<double>(n), acc) / log_n;
    out.residual = std::abs(out.lhs - out.rhs);
    out.truncation_estimate = r_tail_estimate(table, s, n, t) / log_n;
    out.zeros_used = zeros.size();
    out.pass = out.residual <= out.truncation_estimate;
    return out;
}

}  // namespace nblab
