#pragma once

///
/// \file poly_circle.hpp
///
/// Polynomial analogue on the unit circle: power-series inversion, the
/// weighted partial sums W_N(z) = sum_{n<=N} (1 - n/N) a_n z^n of 1/P, the
/// residue sum Y_N, Parseval distances |1 - P Q|^2 and the optimal Q_N from
/// a Hermitian Toeplitz system.
///

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "nblab/error.hpp"
#include "nblab/zeta.hpp"

namespace nblab {

/// Complex polynomial c_0 + c_1 z + ... + c_d z^d. Trailing exact zeros are
/// trimmed, so the leading coefficient is nonzero unless the degree is 0.
class CirclePoly {
public:
    CirclePoly() : c_(1, Complex(0.0)) {}

    explicit CirclePoly(std::vector<Complex> coeffs) : c_(std::move(coeffs))
    {
        if (c_.empty())
            c_.push_back(0.0);
        for (const Complex& v : c_)
            if (!is_finite(v))
                throw Error(ErrorKind::InvalidArgument, "non-finite polynomial coefficient");
        while (c_.size() > 1 && c_.back() == Complex(0.0))
            c_.pop_back();
    }

    std::size_t degree() const noexcept { return c_.size() - 1; }

    /// c_k, zero above the degree.
    Complex coeff(std::size_t k) const noexcept { return k < c_.size() ? c_[k] : Complex(0.0); }

    std::span<const Complex> coeffs() const noexcept { return c_; }

    bool is_zero() const noexcept { return c_.size() == 1 && c_[0] == Complex(0.0); }

    Complex operator()(Complex z) const
    {
        Complex acc = 0.0;
        for (std::size_t k = c_.size(); k-- > 0;)
            acc = acc * z + c_[k];
        return acc;
    }

    Complex derivative_at(Complex z) const
    {
        Complex acc = 0.0;
        for (std::size_t k = c_.size(); k-- > 1;)
            acc = acc * z + static_cast<double>(k) * c_[k];
        return acc;
    }

private:
    std::vector<Complex> c_;
};

inline CirclePoly multiply(const CirclePoly& a, const CirclePoly& b)
{
    const auto x = a.coeffs();
    const auto y = b.coeffs();
    std::vector<Complex> out(x.size() + y.size() - 1, Complex(0.0));
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == Complex(0.0))
            continue;
        for (std::size_t j = 0; j < y.size(); ++j)
            out[i + j] += x[i] * y[j];
    }
    return CirclePoly(std::move(out));
}

/// prod_k (1 - z / r_k), so that P(0) = 1.
inline CirclePoly poly_from_roots(std::span<const Complex> roots)
{
    CirclePoly p(std::vector<Complex>{1.0});
    for (const Complex& r : roots) {
        if (r == Complex(0.0))
            throw Error(ErrorKind::InvalidArgument, "root at the origin would make P(0) = 0");
        p = multiply(p, CirclePoly({1.0, -1.0 / r}));
    }
    return p;
}

namespace detail {

inline Complex ipow(Complex base, std::size_t exponent)
{
    Complex result = 1.0;
    while (exponent > 0) {
        if (exponent & 1u)
            result *= base;
        base *= base;
        exponent >>= 1u;
    }
    return result;
}

}  // namespace detail

/// Roots of P from the companion matrix, each polished by Newton steps on P.
inline std::vector<Complex> find_roots(const CirclePoly& p)
{
    const std::size_t d = p.degree();
    if (d == 0)
        return {};
    const Complex lead = p.coeff(d);
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 1; i < d; ++i)
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    for (std::size_t i = 0; i < d; ++i)
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d - 1)) = -p.coeff(i) / lead;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::AccuracyUnreachable, "companion eigenvalue iteration did not converge");
    std::vector<Complex> roots(d);
    for (std::size_t i = 0; i < d; ++i) {
        Complex z = solver.eigenvalues()(static_cast<Eigen::Index>(i));
        for (int it = 0; it < 8; ++it) {
            const Complex dp = p.derivative_at(z);
            if (dp == Complex(0.0))
                break;
            const Complex step = p(z) / dp;
            z -= step;
            if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z)))
                break;
        }
        roots[i] = z;
    }
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : std::arg(a) < std::arg(b);
    });
    return roots;
}

struct UnitZero {
    Complex root;
    int multiplicity = 1;
};

/// Distinct zeros of P on the unit circle, |root| = 1 within 1e-9.
class UnitZeroSet {
public:
    static constexpr double kRadiusTolerance = 1e-9;
    static constexpr double kSeparation = 1e-6;

    UnitZeroSet() = default;

    explicit UnitZeroSet(std::vector<UnitZero> zeros) : zeros_(std::move(zeros))
    {
        for (std::size_t i = 0; i < zeros_.size(); ++i) {
            if (std::abs(std::abs(zeros_[i].root) - 1.0) > kRadiusTolerance)
                throw Error(ErrorKind::InvalidArgument, "unit zero off the unit circle");
            if (zeros_[i].multiplicity < 1)
                throw Error(ErrorKind::InvalidArgument, "multiplicity must be >= 1");
            for (std::size_t j = 0; j < i; ++j)
                if (std::abs(zeros_[i].root - zeros_[j].root) <= kSeparation)
                    throw Error(ErrorKind::InvalidArgument, "unit zeros are not distinct");
        }
    }

    /// Groups roots within kSeparation and keeps those on the circle.
    static UnitZeroSet from_roots(std::span<const Complex> roots)
    {
        std::vector<UnitZero> out;
        for (const Complex& r : roots) {
            if (std::abs(std::abs(r) - 1.0) > kRadiusTolerance)
                continue;
            auto it = std::find_if(out.begin(), out.end(),
                                   [&](const UnitZero& z) { return std::abs(z.root - r) <= kSeparation; });
            if (it != out.end())
                ++it->multiplicity;
            else
                out.push_back({r / std::abs(r), 1});
        }
        return UnitZeroSet(std::move(out));
    }

    std::span<const UnitZero> zeros() const noexcept { return zeros_; }

    /// sum m(rho)^2, the limit of N * delta_N^2.
    int multiplicity_square_sum() const noexcept
    {
        int total = 0;
        for (const auto& z : zeros_)
            total += z.multiplicity * z.multiplicity;
        return total;
    }

private:
    std::vector<UnitZero> zeros_;
};

/// First m+1 Taylor coefficients of 1/P at 0 from c_0 a_n = -sum_{k>=1} c_k a_{n-k}.
inline std::vector<Complex> invert_series(const CirclePoly& p, std::size_t m)
{
    const Complex c0 = p.coeff(0);
    if (c0 == Complex(0.0))
        throw Error(ErrorKind::ZeroConstantTerm, "P(0) = 0 has no power-series inverse");
    const auto c = p.coeffs();
    std::vector<Complex> a(m + 1);
    a[0] = 1.0 / c0;
    for (std::size_t n = 1; n <= m; ++n) {
        Complex acc = 0.0;
        const std::size_t kmax = std::min(n, c.size() - 1);
        for (std::size_t k = 1; k <= kmax; ++k)
            acc += c[k] * a[n - k];
        a[n] = -acc / c0;
    }
    return a;
}

/// W_N(z) = sum_{n=0}^{N} (1 - n/N) a_n z^n. The n = N weight is exactly zero.
inline CirclePoly build_WN(const CirclePoly& p, std::size_t n)
{
    if (n < 1)
        throw Error(ErrorKind::InvalidArgument, "W_N needs N >= 1");
    std::vector<Complex> a = invert_series(p, n);
    const double big = static_cast<double>(n);
    for (std::size_t k = 0; k <= n; ++k)
        a[k] *= static_cast<double>(n - k) / big;
    return CirclePoly(std::move(a));
}

/// Y_N(s) = sum over the distinct zeros rho of P of the residue of
/// s^N / (P(z) (z-s)^2 z^N) at z = rho; every root must be simple.
inline Complex y_function(const CirclePoly& p, std::span<const Complex> roots, Complex s, std::size_t n)
{
    Complex sum = 0.0;
    for (const Complex& rho : roots) {
        const Complex dp = p.derivative_at(rho);
        if (std::abs(dp) < 1e-10)
            throw Error(ErrorKind::MultipleRoot, "P'(rho) vanishes; the closed-form residue needs simple roots");
        const Complex gap = rho - s;
        if (std::abs(gap) <= 1e-14 * std::max(1.0, std::abs(rho)))
            throw Error(ErrorKind::SingularPoint, "s coincides with a root of P");
        sum += detail::ipow(s / rho, n) / (dp * gap * gap);
    }
    return sum;
}

struct Lemma21Check {
    Complex lhs;  // W_N(s)
    Complex rhs;  // (1/P)(1 + (s/N) P'/P) - (s/N) Y_N
    double residual = 0.0;
};

inline Lemma21Check lemma21_check(const CirclePoly& p, std::span<const Complex> roots, Complex s, std::size_t n)
{
    const CirclePoly w = build_WN(p, n);
    const Complex ps = p(s);
    if (ps == Complex(0.0))
        throw Error(ErrorKind::SingularPoint, "s is a root of P");
    const Complex big = static_cast<double>(n);
    Lemma21Check out;
    out.lhs = w(s);
    out.rhs = (1.0 + (s / big) * p.derivative_at(s) / ps) / ps - (s / big) * y_function(p, roots, s, n);
    out.residual = std::abs(out.lhs - out.rhs);
    return out;
}

inline double lemma21_residual(const CirclePoly& p, std::span<const Complex> roots, Complex s, std::size_t n)
{
    return lemma21_check(p, roots, s, n).residual;
}

inline double lemma21_residual(const CirclePoly& p, Complex s, std::size_t n)
{
    const std::vector<Complex> roots = find_roots(p);
    return lemma21_residual(p, roots, s, n);
}

/// (1/2pi) int_0^{2pi} |1 - P Q (e^{i theta})|^2 d theta as the coefficient
/// sum of squares of 1 - P Q.
inline double delta_sq_parseval(const CirclePoly& p, const CirclePoly& q)
{
    const auto x = p.coeffs();
    const auto y = q.coeffs();
    std::vector<Complex> r(x.size() + y.size() - 1, Complex(0.0));
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == Complex(0.0))
            continue;
        for (std::size_t j = 0; j < y.size(); ++j)
            r[i + j] -= x[i] * y[j];
    }
    r[0] += 1.0;
    double sum = 0.0;
    for (std::size_t k = r.size(); k-- > 0;)
        sum += std::norm(r[k]);
    return sum;
}

// ---------------------------------------------------------------------------
// Hermitian Toeplitz solves

inline constexpr double kMaxToeplitzCondition = 1e13;

struct ToeplitzSolution {
    std::vector<Complex> x;
    double condition_estimate = 0.0;
};

/// T(i,j) = r(i-j) with r(-k) = conj(r(k)); `first_column` holds r(0..n-1).
inline Eigen::MatrixXcd toeplitz_matrix(std::span<const Complex> first_column)
{
    const auto n = static_cast<Eigen::Index>(first_column.size());
    Eigen::MatrixXcd t(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            t(i, j) = i >= j ? first_column[static_cast<std::size_t>(i - j)]
                             : std::conj(first_column[static_cast<std::size_t>(j - i)]);
    return t;
}

/// Cholesky solve of the dense matrix; condition from LLT's reciprocal estimate.
inline ToeplitzSolution dense_toeplitz_solve(std::span<const Complex> first_column, std::span<const Complex> rhs)
{
    if (first_column.size() != rhs.size() || rhs.empty())
        throw Error(ErrorKind::InvalidArgument, "Toeplitz size mismatch");
    const Eigen::MatrixXcd t = toeplitz_matrix(first_column);
    Eigen::LLT<Eigen::MatrixXcd> llt(t);
    if (llt.info() != Eigen::Success)
        throw IllConditionedError("Toeplitz matrix is not numerically positive definite",
                                  std::numeric_limits<double>::infinity());
    const double rcond = llt.rcond();
    const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!(cond <= kMaxToeplitzCondition))
        throw IllConditionedError("Toeplitz system too ill-conditioned", cond);
    const Eigen::Map<const Eigen::VectorXcd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    const Eigen::VectorXcd sol = llt.solve(b);
    return {std::vector<Complex>(sol.data(), sol.data() + sol.size()), cond};
}

/// Levinson recursion with forward and backward vectors, O(n^2) time and
/// O(n) memory. Condition estimate: ||T||_1 * max(||T^{-1} e_0||_1, ||T^{-1} e_{n-1}||_1),
/// a lower bound on the 1-norm condition number.
inline ToeplitzSolution levinson_solve(std::span<const Complex> first_column, std::span<const Complex> rhs)
{
    const std::size_t n = first_column.size();
    if (n != rhs.size() || n == 0)
        throw Error(ErrorKind::InvalidArgument, "Toeplitz size mismatch");
    const Complex r0 = first_column[0];
    if (!(r0.real() > 0.0))
        throw IllConditionedError("Toeplitz diagonal is not positive", std::numeric_limits<double>::infinity());
    auto col = [&](std::size_t k) { return first_column[k]; };            // T(k, 0)
    auto row = [&](std::size_t k) { return std::conj(first_column[k]); };  // T(0, k)

    std::vector<Complex> f{1.0 / r0};
    std::vector<Complex> b{1.0 / r0};
    std::vector<Complex> x{rhs[0] / r0};
    f.reserve(n);
    b.reserve(n);
    x.reserve(n);
    std::vector<Complex> f_next(n), b_next(n);
    for (std::size_t m = 1; m < n; ++m) {
        Complex ef = 0.0;
        Complex eb = 0.0;
        Complex ex = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            ef += col(m - i) * f[i];
            eb += row(i + 1) * b[i];
            ex += col(m - i) * x[i];
        }
        const Complex denom = 1.0 - ef * eb;
        if (!(std::abs(denom) > 1e-300) || !is_finite(denom))
            throw IllConditionedError("Levinson recursion broke down", std::numeric_limits<double>::infinity());
        const Complex inv = 1.0 / denom;
        // [f;0] and [0;b] combined in place.
        for (std::size_t i = 0; i <= m; ++i) {
            const Complex fe = i < m ? f[i] : Complex(0.0);
            const Complex be = i > 0 ? b[i - 1] : Complex(0.0);
            f_next[i] = (fe - ef * be) * inv;
            b_next[i] = (be - eb * fe) * inv;
        }
        f.assign(f_next.begin(), f_next.begin() + static_cast<std::ptrdiff_t>(m + 1));
        b.assign(b_next.begin(), b_next.begin() + static_cast<std::ptrdiff_t>(m + 1));
        const Complex gain = rhs[m] - ex;
        x.push_back(0.0);
        for (std::size_t i = 0; i <= m; ++i)
            x[i] += gain * b[i];
    }
    double t_norm = std::abs(r0);
    for (std::size_t k = 1; k < n; ++k)
        t_norm += 2.0 * std::abs(first_column[k]);
    double f_norm = 0.0;
    double b_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        f_norm += std::abs(f[i]);
        b_norm += std::abs(b[i]);
    }
    const double cond = t_norm * std::max(f_norm, b_norm);
    for (const Complex& v : x)
        if (!is_finite(v))
            throw IllConditionedError("Levinson solution is not finite", cond);
    if (!(cond <= kMaxToeplitzCondition))
        throw IllConditionedError("Toeplitz system too ill-conditioned", cond);
    return {std::move(x), cond};
}

/// Size above which the O(n^2) Levinson recursion replaces the dense solve.
inline constexpr std::size_t kDenseToeplitzLimit = 512;

inline ToeplitzSolution hermitian_toeplitz_solve(std::span<const Complex> first_column, std::span<const Complex> rhs)
{
    return first_column.size() <= kDenseToeplitzLimit ? dense_toeplitz_solve(first_column, rhs)
                                                      : levinson_solve(first_column, rhs);
}

struct OptimalApproximation {
    CirclePoly q;
    double delta2 = 0.0;            // 1 - Re(b^H q) from the normal equations
    double delta2_parseval = 0.0;   // |1 - P q|^2 by Parseval, same quantity
    double condition_estimate = 0.0;
    bool zeros_inside_disc = false;  // Grenander-Rosenblatt hypothesis violated
};

/// Best Q of degree <= N minimizing |1 - P Q|^2 on the circle. The normal
/// equations have the Hermitian Toeplitz matrix of P's autocorrelation
/// r(l) = sum_m conj(p_m) p_{m+l} and right-hand side conj(p_0) e_0.
inline OptimalApproximation optimal_QN(const CirclePoly& p, std::size_t n)
{
    if (p.is_zero())
        throw Error(ErrorKind::InvalidArgument, "P must be nonzero");
    const auto c = p.coeffs();
    const std::size_t size = n + 1;
    std::vector<Complex> column(size, Complex(0.0));
    for (std::size_t l = 0; l < size && l < c.size(); ++l) {
        Complex acc = 0.0;
        for (std::size_t m = 0; m + l < c.size(); ++m)
            acc += std::conj(c[m]) * c[m + l];
        column[l] = acc;
    }
    std::vector<Complex> rhs(size, Complex(0.0));
    rhs[0] = std::conj(c[0]);
    ToeplitzSolution sol = hermitian_toeplitz_solve(column, rhs);

    OptimalApproximation out;
    out.delta2 = 1.0 - (c[0] * sol.x[0]).real();
    out.q = CirclePoly(std::move(sol.x));
    out.delta2_parseval = delta_sq_parseval(p, out.q);
    out.condition_estimate = sol.condition_estimate;
    for (const Complex& r : find_roots(p))
        if (std::abs(r) < 1.0 - UnitZeroSet::kRadiusTolerance)
            out.zeros_inside_disc = true;
    return out;
}

struct Theorem2Row {
    std::size_t n = 0;
    double delta2_w = 0.0;
    double n_delta2_w = 0.0;
    double delta2_opt = 0.0;
    double n_delta2_opt = 0.0;
    double condition_estimate = 0.0;
};

struct Theorem2Scan {
    std::vector<Theorem2Row> rows;
    int expected_limit = 0;  // sum of m(rho)^2 over unit-circle zeros
};

/// N delta^2 for W_N and for the optimal Q_N at each N. `with_optimal` can
/// skip the O(N^2) Toeplitz solve when only the W_N column is needed.
inline Theorem2Scan theorem2_scan(const CirclePoly& p, const UnitZeroSet& unit_zeros, std::span<const std::size_t> ns,
                                  bool with_optimal = true)
{
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ns[i] < 1)
            throw Error(ErrorKind::InvalidArgument, "scan sizes must be >= 1");
        if (i > 0 && ns[i] <= ns[i - 1])
            throw Error(ErrorKind::InvalidArgument, "scan sizes must be strictly ascending");
    }
    Theorem2Scan scan;
    scan.expected_limit = unit_zeros.multiplicity_square_sum();
    for (std::size_t n : ns) {
        Theorem2Row row;
        row.n = n;
        const double big = static_cast<double>(n);
        row.delta2_w = delta_sq_parseval(p, build_WN(p, n));
        row.n_delta2_w = big * row.delta2_w;
        if (with_optimal) {
            const OptimalApproximation opt = optimal_QN(p, n);
            row.delta2_opt = opt.delta2;
            row.n_delta2_opt = big * opt.delta2;
            row.condition_estimate = opt.condition_estimate;
        } else {
            row.delta2_opt = std::numeric_limits<double>::quiet_NaN();
            row.n_delta2_opt = std::numeric_limits<double>::quiet_NaN();
        }
        scan.rows.push_back(row);
    }
    return scan;
}

}  // namespace nblab
