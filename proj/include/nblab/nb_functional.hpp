#pragma once

///
/// \file nb_functional.hpp
///
/// The weighted critical-line distance
///
///   I(A) = (1/2pi) int_R |1 - zeta A(1/2+it)|^2 dt / (1/4 + t^2)
///        = (1/pi)  int_0^inf ...              (the integrand is even in t)
///
/// for a Dirichlet polynomial A, and its minimum d_N^2 over all A of length N
/// via the Gram normal equations. Both share one Gauss-Legendre grid with
/// zeta(1/2+it) cached at every node.
///

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "nblab/dirichlet.hpp"
#include "nblab/error.hpp"
#include "nblab/quadrature.hpp"
#include "nblab/zeta.hpp"

namespace nblab {

/// 2 + gamma - log(4 pi) = 0.0461914179322...
inline const double kNymanBeurlingConstant = 2.0 + kEulerGamma - std::log(4.0 * kPi);

/// (1/pi) int_T^inf dt / (1/4 + t^2) = (2/pi) arctan(1/(2T)).
inline double bare_weight_tail(double t_max)
{
    return 2.0 / kPi * std::atan(0.5 / t_max);
}

/// (1/pi) int_T^inf log(t/2pi) dt / t^2 with the logarithm clipped at 0 below 2pi.
inline double mean_value_tail_weight(double t_max)
{
    const double t = std::max(t_max, kTwoPi);
    return (std::log(t / kTwoPi) + 1.0) / (kPi * t);
}

/// Tail of I(A) beyond t_max, using |zeta(1/2+it)|^2 ~ log(t/2pi) on average
/// and M = sum a_n^2 / n for the polynomial factor.
inline double distance_tail(double t_max, double mean_square)
{
    return bare_weight_tail(t_max) + mean_square * mean_value_tail_weight(t_max);
}

struct GridOptions {
    std::size_t max_length = 1000;  // longest polynomial the panels must resolve
    bool cache_zeta = true;
    unsigned threads = 0;  // 0: hardware concurrency
};

/// Gauss-Legendre panels on [0, t_max] (or [-t_max, 0] once mirrored).
/// Node j of panel p is entry p * panel_rule + j; `weights` already include
/// the half-width factor but not 1/(1/4+t^2).
struct QuadratureGrid {
    double t_max = 0.0;
    int panel_rule = 16;
    std::size_t max_length = 0;
    EvalAccuracy acc;
    std::vector<double> edges;
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<Complex> zeta_cache;  // zeta(1/2 + i t_k); empty if not cached
    double weight_integral = 0.0;     // (1/pi) sum w_k / (1/4+t_k^2) + est_tail
    double est_tail = 0.0;            // bare_weight_tail(t_max)
    int refinements = 0;

    std::size_t panel_count() const noexcept { return edges.empty() ? 0 : edges.size() - 1; }
    std::size_t node_count() const noexcept { return nodes.size(); }
};

namespace detail {

inline double critical_weight(double t) { return 1.0 / (0.25 + t * t); }

/// Highest angular frequency of |1 - zeta A|^2 near height t.
inline double integrand_frequency(double t, std::size_t max_length)
{
    return std::log(std::max(t, kTwoPi) / kTwoPi) + 2.0 * std::log(static_cast<double>(std::max<std::size_t>(max_length, 1))) +
           2.0;
}

inline std::vector<double> panel_edges(double t_max, int rule, std::size_t max_length, double shrink)
{
    // About 3/8 of a radian of phase per node.
    const double kappa = 3.0 * rule / 16.0;
    std::vector<double> edges{0.0};
    double t = 0.0;
    while (t < t_max) {
        const double h = shrink * std::min(2.0 * kappa / integrand_frequency(t, max_length), 0.25 + 0.5 * t);
        double next = t + h;
        if (next > t_max || t_max - next < 0.25 * h)
            next = t_max;
        edges.push_back(next);
        t = next;
    }
    return edges;
}

inline void fill_nodes(QuadratureGrid& grid)
{
    const GaussLegendreRule& rule = gauss_legendre(grid.panel_rule);
    const std::size_t panels = grid.panel_count();
    const auto n = static_cast<std::size_t>(grid.panel_rule);
    grid.nodes.resize(panels * n);
    grid.weights.resize(panels * n);
    for (std::size_t p = 0; p < panels; ++p) {
        const double a = grid.edges[p];
        const double b = grid.edges[p + 1];
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (std::size_t k = 0; k < n; ++k) {
            grid.nodes[p * n + k] = mid + half * rule.nodes[k];
            grid.weights[p * n + k] = half * rule.weights[k];
        }
    }
}

inline double weight_integral(const QuadratureGrid& grid)
{
    double sum = 0.0;
    for (std::size_t k = grid.nodes.size(); k-- > 0;)
        sum += grid.weights[k] * critical_weight(grid.nodes[k]);
    return sum / kPi + grid.est_tail;
}

/// Contiguous panel ranges; the partition depends only on the panel count.
inline std::vector<std::size_t> panel_blocks(std::size_t panels, std::size_t target_blocks)
{
    const std::size_t blocks = std::max<std::size_t>(1, std::min(panels, target_blocks));
    std::vector<std::size_t> starts(blocks + 1);
    for (std::size_t b = 0; b <= blocks; ++b)
        starts[b] = panels * b / blocks;
    return starts;
}

}  // namespace detail

/// Tolerance on |weight integral - 1| that every accepted grid meets.
inline double weight_tolerance(const EvalAccuracy& acc)
{
    return std::max(1e-13, std::min(acc.abs_tol, 1e-8));
}

inline QuadratureGrid build_grid(double t_max, int panel_rule, const EvalAccuracy& acc = {}, const GridOptions& opt = {})
{
    acc.validate();
    if (!(t_max > 0.0) || !std::isfinite(t_max))
        throw Error(ErrorKind::InvalidArgument, "t_max must be positive and finite");
    if (t_max > kMaxZetaHeight)
        throw Error(ErrorKind::DomainError, "t_max exceeds the supported zeta height");
    if (panel_rule != 8 && panel_rule != 16 && panel_rule != 32)
        throw Error(ErrorKind::InvalidArgument, "panel_rule must be 8, 16 or 32");
    if (opt.max_length < 1)
        throw Error(ErrorKind::InvalidArgument, "max_length must be >= 1");

    QuadratureGrid grid;
    grid.t_max = t_max;
    grid.panel_rule = panel_rule;
    grid.max_length = opt.max_length;
    grid.acc = acc;
    grid.est_tail = bare_weight_tail(t_max);
    const double tol = weight_tolerance(acc);
    double shrink = 1.0;
    for (int level = 0;; ++level) {
        grid.edges = detail::panel_edges(t_max, panel_rule, opt.max_length, shrink);
        detail::fill_nodes(grid);
        grid.weight_integral = detail::weight_integral(grid);
        grid.refinements = level;
        if (std::abs(grid.weight_integral - 1.0) <= tol)
            break;
        if (level == 12)
            throw Error(ErrorKind::AccuracyUnreachable, "weight integral does not converge under panel refinement");
        shrink *= 0.5;
    }

    if (opt.cache_zeta) {
        grid.zeta_cache.assign(grid.nodes.size(), Complex(0.0));
        const auto top = detail::plan_euler_maclaurin(Complex(0.5, t_max), 0, acc).cutoff;
        const PowerSieve sieve(static_cast<std::size_t>(top) + 1);
        const auto blocks = detail::panel_blocks(grid.panel_count(), 256);
        const auto n = static_cast<std::size_t>(panel_rule);
        parallel_for(blocks.size() - 1, opt.threads, [&](std::size_t b) {
            std::vector<Complex> scratch;
            for (std::size_t k = blocks[b] * n; k < blocks[b + 1] * n; ++k)
                grid.zeta_cache[k] = zeta_with_sieve(Complex(0.5, grid.nodes[k]), sieve, scratch, acc);
        });
    }
    return grid;
}

/// The same grid on [-t_max, 0]: nodes negated and reversed, zeta conjugated.
/// The panel-local node order stays ascending because Gauss nodes are symmetric.
inline QuadratureGrid mirror(const QuadratureGrid& grid)
{
    QuadratureGrid out = grid;
    std::reverse(out.edges.begin(), out.edges.end());
    for (double& e : out.edges)
        e = -e;
    std::reverse(out.nodes.begin(), out.nodes.end());
    for (double& t : out.nodes)
        t = -t;
    std::reverse(out.weights.begin(), out.weights.end());
    std::reverse(out.zeta_cache.begin(), out.zeta_cache.end());
    for (Complex& z : out.zeta_cache)
        z = std::conj(z);
    return out;
}

struct DistanceReport {
    double value = 0.0;  // quadrature on [0, t_max] plus tail_estimate
    double quad_error = 0.0;
    double tail_estimate = 0.0;
    double t_max = 0.0;
    std::size_t N = 0;

    double budget() const noexcept { return quad_error + tail_estimate; }
};

namespace detail {

inline void require_cached(const QuadratureGrid& grid, std::size_t length)
{
    if (grid.zeta_cache.size() != grid.nodes.size() || grid.nodes.empty())
        throw Error(ErrorKind::InvalidArgument, "grid has no zeta cache");
    if (length > grid.max_length)
        throw Error(ErrorKind::InvalidArgument, "polynomial longer than the grid was resolved for");
}

}  // namespace detail

/// I(p) on the grid. quad_error sums, per panel, the two highest discrete
/// Legendre coefficients of the integrand (a resolution indicator), the
/// propagated zeta error and a rounding floor.
inline DistanceReport distance_integral(const DirichletPoly& p, const QuadratureGrid& grid, unsigned threads = 0)
{
    detail::require_cached(grid, p.length());
    const GaussLegendreRule& rule = gauss_legendre(grid.panel_rule);
    const auto n = static_cast<std::size_t>(grid.panel_rule);
    const PowerSieve sieve(p.length() + 1);
    const auto blocks = detail::panel_blocks(grid.panel_count(), 256);
    struct Partial {
        double sum = 0.0;
        double err = 0.0;
    };
    std::vector<Partial> partial(blocks.size() - 1);
    parallel_for(partial.size(), threads, [&](std::size_t b) {
        std::vector<Complex> powers(p.length() + 1);
        std::vector<double> f(n);
        Partial acc;
        for (std::size_t panel = blocks[b]; panel < blocks[b + 1]; ++panel) {
            const double half = 0.5 * (grid.edges[panel + 1] - grid.edges[panel]);
            double zeta_err = 0.0;
            double magnitude = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const std::size_t k = panel * n + j;
                const double t = grid.nodes[k];
                sieve.fill(Complex(0.5, t), powers);
                const Complex a = p.evaluate_with_powers(powers);
                const Complex r = 1.0 - grid.zeta_cache[k] * a;
                const double w = detail::critical_weight(t);
                f[j] = std::norm(r) * w;
                acc.sum += grid.weights[k] * f[j];
                magnitude += grid.weights[k] * f[j];
                zeta_err += grid.weights[k] * w * 2.0 * std::abs(r) * std::abs(a) * grid.acc.abs_tol;
            }
            double c1 = 0.0;
            double c2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                c1 += rule.tail_rows[0][j] * f[j];
                c2 += rule.tail_rows[1][j] * f[j];
            }
            acc.err += half * (std::abs(c1) + std::abs(c2)) + zeta_err +
                       16.0 * std::numeric_limits<double>::epsilon() * magnitude;
        }
        partial[b] = acc;
    });
    double sum = 0.0;
    double err = 0.0;
    for (const Partial& part : partial) {
        sum += part.sum;
        err += part.err;
    }
    DistanceReport report;
    report.tail_estimate = distance_tail(grid.t_max, mean_square_weight(p));
    report.value = sum / kPi + report.tail_estimate;
    report.quad_error = err / kPi;
    report.t_max = grid.t_max;
    report.N = p.length();
    return report;
}

/// Normal equations of min_a c - 2 b^T a + a^T G a, the quadratic form of
/// I(sum a_n n^{-s}) on the grid. The tail model adds diag(L / n) to G
/// (L = mean_value_tail_weight) and nothing to b, which matches distance_tail.
struct GramSystem {
    std::size_t N = 0;
    Eigen::MatrixXd G;
    Eigen::VectorXd b;
    double c = 1.0;
    double tail_weight = 0.0;
    double t_max = 0.0;
};

inline GramSystem gram_assemble(std::size_t n_terms, const QuadratureGrid& grid, unsigned threads = 0)
{
    if (n_terms < 1)
        throw Error(ErrorKind::InvalidArgument, "Gram system needs N >= 1");
    detail::require_cached(grid, n_terms);
    const auto N = static_cast<Eigen::Index>(n_terms);
    const auto rule = static_cast<std::size_t>(grid.panel_rule);
    const PowerSieve sieve(n_terms + 1);
    // Fixed block count keeps the reduction order independent of threading;
    // fewer blocks for large N bound the partial-matrix memory.
    const std::size_t target = n_terms > 600 ? 4 : 8;
    const auto blocks = detail::panel_blocks(grid.panel_count(), target);
    std::vector<Eigen::MatrixXd> partial_g(blocks.size() - 1);
    std::vector<Eigen::VectorXd> partial_b(blocks.size() - 1);
    constexpr Eigen::Index kChunk = 128;
    parallel_for(partial_g.size(), threads, [&](std::size_t blk) {
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(N, N);
        Eigen::VectorXd bv = Eigen::VectorXd::Zero(N);
        Eigen::MatrixXd u(N, 2 * kChunk);
        std::vector<Complex> powers(n_terms + 1);
        Eigen::Index col = 0;
        auto flush = [&] {
            if (col > 0)
                g.selfadjointView<Eigen::Lower>().rankUpdate(u.leftCols(col));
            col = 0;
        };
        for (std::size_t k = blocks[blk] * rule; k < blocks[blk + 1] * rule; ++k) {
            const double t = grid.nodes[k];
            const double ww = grid.weights[k] * detail::critical_weight(t) / kPi;
            const double root = std::sqrt(ww);
            sieve.fill(Complex(0.5, t), powers);
            const Complex z = grid.zeta_cache[k];
            for (Eigen::Index m = 0; m < N; ++m) {
                const Complex v = z * powers[static_cast<std::size_t>(m) + 1];
                u(m, col) = root * v.real();
                u(m, col + 1) = root * v.imag();
                bv(m) += ww * v.real();
            }
            col += 2;
            if (col == 2 * kChunk)
                flush();
        }
        flush();
        partial_g[blk] = std::move(g);
        partial_b[blk] = std::move(bv);
    });
    GramSystem sys;
    sys.N = n_terms;
    sys.t_max = grid.t_max;
    sys.G = Eigen::MatrixXd::Zero(N, N);
    sys.b = Eigen::VectorXd::Zero(N);
    for (std::size_t blk = 0; blk < partial_g.size(); ++blk) {
        sys.G.triangularView<Eigen::Lower>() += partial_g[blk];
        sys.b += partial_b[blk];
    }
    sys.G.triangularView<Eigen::StrictlyUpper>() = sys.G.transpose();
    sys.tail_weight = mean_value_tail_weight(grid.t_max);
    for (Eigen::Index m = 0; m < N; ++m)
        sys.G(m, m) += sys.tail_weight / static_cast<double>(m + 1);
    sys.c = 1.0;
    return sys;
}

inline constexpr double kMaxGramCondition = 1e14;

struct OptimalDistance {
    DirichletPoly coeffs{std::vector<double>{0.0}};
    double d2 = 0.0;
    bool clamped = false;  // quadrature noise pushed c - b^T a below zero
    double condition_estimate = 0.0;
};

inline OptimalDistance optimal_dN2(const GramSystem& sys)
{
    Eigen::LLT<Eigen::MatrixXd> llt(sys.G);
    if (llt.info() != Eigen::Success) {
        const double ratio = sys.G.diagonal().maxCoeff() / std::max(sys.G.diagonal().minCoeff(), 1e-300);
        throw IllConditionedError("Gram matrix is not numerically positive definite", ratio);
    }
    const double rcond = llt.rcond();
    const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!(cond <= kMaxGramCondition))
        throw IllConditionedError("Gram matrix too ill-conditioned", cond);
    const Eigen::VectorXd a = llt.solve(sys.b);
    OptimalDistance out;
    out.coeffs = DirichletPoly(std::vector<double>(a.data(), a.data() + a.size()));
    out.d2 = sys.c - sys.b.dot(a);
    if (out.d2 < 0.0) {
        out.d2 = 0.0;
        out.clamped = true;
    }
    out.condition_estimate = cond;
    return out;
}

struct AsymptoteRow {
    std::size_t N = 0;
    double I_VN = 0.0;
    double I_logN = 0.0;
    double d2_opt = std::numeric_limits<double>::quiet_NaN();  // NaN above gram_max
    double d2_logN = std::numeric_limits<double>::quiet_NaN();
    double quad_error = 0.0;
    double tail = 0.0;
    double t_max = 0.0;
    bool d2_clamped = false;
};

struct AsymptoteScan {
    std::vector<AsymptoteRow> rows;
    double reference_constant = kNymanBeurlingConstant;
};

struct ScanOptions {
    std::size_t gram_max = 400;  // largest N for which the Gram solve runs
    unsigned threads = 0;
};

inline void check_scan_sizes(std::span<const std::size_t> ns)
{
    if (ns.empty())
        throw Error(ErrorKind::InvalidArgument, "scan needs at least one N");
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ns[i] < 2)
            throw Error(ErrorKind::DegenerateLength, "scan sizes must be >= 2");
        if (i > 0 && ns[i] <= ns[i - 1])
            throw Error(ErrorKind::InvalidArgument, "scan sizes must be strictly ascending");
    }
}

/// One row per N on a single grid: I(V_N), its log-N scaling and, up to
/// gram_max, the optimal d_N^2.
inline AsymptoteRow asymptote_row(std::size_t n, const MoebiusTable& mu, const QuadratureGrid& grid,
                                  const ScanOptions& opt = {})
{
    const DistanceReport rep = distance_integral(build_VN(n, mu), grid, opt.threads);
    AsymptoteRow row;
    const double log_n = std::log(static_cast<double>(n));
    row.N = n;
    row.I_VN = rep.value;
    row.I_logN = rep.value * log_n;
    row.quad_error = rep.quad_error;
    row.tail = rep.tail_estimate;
    row.t_max = grid.t_max;
    if (n <= opt.gram_max) {
        const OptimalDistance best = optimal_dN2(gram_assemble(n, grid, opt.threads));
        row.d2_opt = best.d2;
        row.d2_logN = best.d2 * log_n;
        row.d2_clamped = best.clamped;
    }
    return row;
}

inline AsymptoteScan asymptote_scan(std::span<const std::size_t> ns, const QuadratureGrid& grid, const ScanOptions& opt = {})
{
    check_scan_sizes(ns);
    const MoebiusTable mu = moebius_sieve(ns.back());
    AsymptoteScan scan;
    for (std::size_t n : ns)
        scan.rows.push_back(asymptote_row(n, mu, grid, opt));
    return scan;
}

}  // namespace nblab
