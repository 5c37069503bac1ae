#pragma once

///
/// \file app.hpp
///
/// Command-line front end. Every flag lives on the top-level parser so that
/// `nblab --help` lists all of them; each subcommand accepts a fixed subset
/// and rejects the rest.
///

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nblab/error.hpp"
#include "nblab/nb_functional.hpp"
#include "nblab/poly_circle.hpp"
#include "nblab/zeros.hpp"

#ifndef NBLAB_DEFAULT_ZEROS
#define NBLAB_DEFAULT_ZEROS "data/zeros_2500.txt"
#endif

namespace nblab::app {

using json = nlohmann::ordered_json;

enum class Tier { Fast, Standard, Strict };

struct TierPreset {
    double abs_tol = 1e-10;
    double t_max = 5000.0;
    int panel_rule = 16;
};

/// Strict switches to a taller, higher-order grid once N passes 300, where
/// the mean-value tail at T = 5000 would dominate the budget.
inline TierPreset tier_preset(Tier tier, std::size_t max_length)
{
    switch (tier) {
    case Tier::Fast: return {1e-8, 1000.0, 8};
    case Tier::Standard: return {1e-10, 5000.0, 16};
    case Tier::Strict: return max_length > 300 ? TierPreset{1e-12, 2.0e4, 32} : TierPreset{1e-12, 5000.0, 16};
    }
    return {};
}

inline std::string_view tier_name(Tier tier)
{
    switch (tier) {
    case Tier::Fast: return "fast";
    case Tier::Standard: return "standard";
    case Tier::Strict: return "strict";
    }
    return "standard";
}

struct RunConfig {
    std::string subcommand;
    std::string output;  // empty: standard output
    std::string format = "csv";
    std::uint64_t seed = 2024;
    bool deterministic = false;
    Tier tier = Tier::Standard;
    unsigned threads = 0;
    std::vector<std::size_t> ns;
    double t_max = std::numeric_limits<double>::quiet_NaN();  // NaN: tier preset
    std::string zeros_path = NBLAB_DEFAULT_ZEROS;
    bool verify_zeros = true;
    double t_cap = std::numeric_limits<double>::quiet_NaN();
    Complex s{0.5, 0.0};
    std::vector<double> heights{1000.0};
    std::vector<Complex> poly;
    std::size_t gram_max = 400;
    std::size_t count = 100;
};

// ---------------------------------------------------------------- parsing

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    for (;;) {
        const auto pos = s.find(sep);
        out.push_back(trim(s.substr(0, pos)));
        if (pos == std::string_view::npos)
            return out;
        s.remove_prefix(pos + 1);
    }
}

/// Whole-token double; accepts a leading '+'.
inline double parse_double(std::string_view token, std::string_view what)
{
    std::string_view body = token;
    if (!body.empty() && body.front() == '+')
        body.remove_prefix(1);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (body.empty() || ec != std::errc() || end != body.data() + body.size() || !std::isfinite(value))
        throw Error(ErrorKind::InvalidArgument, std::string(what) + ": cannot parse '" + std::string(token) + "'");
    return value;
}

inline std::size_t parse_size(std::string_view token, std::string_view what)
{
    std::size_t value = 0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() || end != token.data() + token.size())
        throw Error(ErrorKind::InvalidArgument, std::string(what) + ": cannot parse '" + std::string(token) + "'");
    return value;
}

inline bool is_ellipsis(std::string_view token) { return token == "..." || token == "…"; }

}  // namespace detail

/// Comma-separated lengths with an optional ellipsis before the last entry:
/// "10,20,...,100" is arithmetic, "1,2,4,...,4096" geometric. Two leading
/// terms are read as arithmetic; a geometric run needs three. The run must
/// land exactly on the final entry.
inline std::vector<std::size_t> parse_length_list(std::string_view text)
{
    const auto tokens = detail::split(text, ',');
    std::vector<std::size_t> head;
    std::size_t i = 0;
    for (; i < tokens.size() && !detail::is_ellipsis(tokens[i]); ++i)
        head.push_back(detail::parse_size(tokens[i], "--N"));
    if (i == tokens.size()) {
        if (head.empty())
            throw Error(ErrorKind::InvalidArgument, "--N: empty list");
        return head;
    }
    if (head.size() < 2 || i + 2 != tokens.size())
        throw Error(ErrorKind::InvalidArgument, "--N: an ellipsis needs two leading terms and one final term");
    const std::size_t last = detail::parse_size(tokens[i + 1], "--N");
    const std::size_t a = head[0];
    const std::size_t b = head[1];
    if (b <= a)
        throw Error(ErrorKind::InvalidArgument, "--N: an ellipsis run must increase");
    const bool arithmetic = head.size() == 2 || head[2] - head[1] == b - a;
    const bool geometric = head.size() > 2 && a > 0 && b % a == 0 && head[2] == head[1] * (b / a);
    if (!arithmetic && !geometric)
        throw Error(ErrorKind::InvalidArgument, "--N: leading terms are neither arithmetic nor geometric");
    for (std::size_t k = 1; k < head.size(); ++k) {
        const bool ok = arithmetic ? head[k] - head[k - 1] == b - a : head[k] == head[k - 1] * (b / a);
        if (!ok)
            throw Error(ErrorKind::InvalidArgument, "--N: leading terms do not follow one progression");
    }
    std::vector<std::size_t> out = head;
    while (out.back() < last)
        out.push_back(arithmetic ? out.back() + (b - a) : out.back() * (b / a));
    if (out.back() != last)
        throw Error(ErrorKind::InvalidArgument, "--N: the progression does not reach the final term");
    return out;
}

inline std::vector<double> parse_real_list(std::string_view text, std::string_view what)
{
    std::vector<double> out;
    for (auto token : detail::split(text, ','))
        out.push_back(detail::parse_double(token, what));
    return out;
}

/// "0.6+5i", "0.5-14.13i", "-2", "3i", "-i". 'j' works as well as 'i'.
inline Complex parse_complex(std::string_view text)
{
    std::string_view s = detail::trim(text);
    if (s.empty())
        throw Error(ErrorKind::InvalidArgument, "empty complex number");
    if (s.back() != 'i' && s.back() != 'j')
        return {detail::parse_double(s, "complex"), 0.0};
    s.remove_suffix(1);
    // Split at the last sign that is not an exponent sign.
    std::size_t split = std::string_view::npos;
    for (std::size_t k = s.size(); k-- > 1;)
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    const std::string_view re = split == std::string_view::npos ? std::string_view{} : s.substr(0, split);
    std::string_view im = split == std::string_view::npos ? s : s.substr(split);
    double imag = 0.0;
    if (im.empty() || im == "+")
        imag = 1.0;
    else if (im == "-")
        imag = -1.0;
    else
        imag = detail::parse_double(im, "complex");
    return {re.empty() ? 0.0 : detail::parse_double(re, "complex"), imag};
}

inline std::vector<Complex> parse_complex_list(std::string_view text)
{
    std::vector<Complex> out;
    for (auto token : detail::split(text, ','))
        out.push_back(parse_complex(token));
    return out;
}

/// Shortest round-trip decimal; integral values keep a ".0".
inline std::string format_double(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    std::string out(buf, end);
    if (out.find_first_of(".en") == std::string::npos)
        out += ".0";
    return out;
}

// ---------------------------------------------------------------- output

/// Rows are flat json objects sharing one key order; CSV takes its header
/// from the first row.
struct Report {
    json config = json::object();
    json meta = json::object();
    json rows = json::array();
};

inline std::string csv_cell(const json& v)
{
    if (v.is_null())
        return "nan";
    if (v.is_number_float())
        return format_double(v.get<double>());
    if (v.is_boolean())
        return v.get<bool>() ? "true" : "false";
    if (v.is_string())
        return v.get<std::string>();
    return v.dump();
}

inline std::string render_csv(const Report& rep)
{
    std::string out;
    if (rep.rows.empty())
        return out;
    bool first = true;
    for (const auto& [key, value] : rep.rows[0].items()) {
        out += first ? "" : ",";
        out += key;
        first = false;
    }
    out += '\n';
    for (const auto& row : rep.rows) {
        first = true;
        for (const auto& [key, value] : row.items()) {
            out += first ? "" : ",";
            out += csv_cell(value);
            first = false;
        }
        out += '\n';
    }
    return out;
}

/// NaN is not valid JSON; it goes out as null.
inline json number(double x)
{
    if (!std::isfinite(x))
        return nullptr;
    return x;
}

inline std::string render_json(const std::string& subcommand, const Report& rep)
{
    json doc;
    doc["subcommand"] = subcommand;
    doc["config"] = rep.config;
    doc["meta"] = rep.meta;
    doc["results"] = rep.rows;
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------- subcommands

namespace detail {

inline json complex_json(Complex z) { return json::array({number(z.real()), number(z.imag())}); }

inline std::string complex_text(Complex z)
{
    return format_double(z.real()) + (std::signbit(z.imag()) ? "-" : "+") + format_double(std::abs(z.imag())) + "i";
}

inline void require_lengths(const RunConfig& cfg)
{
    if (cfg.ns.empty())
        throw Error(ErrorKind::InvalidArgument, cfg.subcommand + " needs --N");
}

inline QuadratureGrid tier_grid(const RunConfig& cfg, Report& rep)
{
    const std::size_t max_n = cfg.ns.back();
    const TierPreset preset = tier_preset(cfg.tier, max_n);
    const double t_max = std::isnan(cfg.t_max) ? preset.t_max : cfg.t_max;
    EvalAccuracy acc;
    acc.abs_tol = preset.abs_tol;
    GridOptions opt;
    opt.max_length = max_n;
    opt.threads = cfg.threads;
    QuadratureGrid grid = build_grid(t_max, preset.panel_rule, acc, opt);
    rep.config["t_max"] = t_max;
    rep.config["panel_rule"] = preset.panel_rule;
    rep.config["abs_tol"] = preset.abs_tol;
    rep.meta["nodes"] = grid.node_count();
    rep.meta["weight_integral"] = grid.weight_integral;
    return grid;
}

inline ZeroTable tier_zeros(const RunConfig& cfg, Report& rep)
{
    LoadOptions opt;
    opt.verify = cfg.verify_zeros;
    opt.t_cap = cfg.t_cap;
    opt.acc.abs_tol = tier_preset(cfg.tier, 0).abs_tol;
    opt.threads = cfg.threads;
    ZeroTable table = load_zeros(cfg.zeros_path, opt);
    rep.config["zeros"] = cfg.zeros_path;
    rep.config["verify_zeros"] = cfg.verify_zeros;
    rep.meta["zeros_loaded"] = table.size();
    rep.meta["zeros_t_cap"] = table.t_cap();
    return table;
}

}  // namespace detail

inline Report run_vn_scan(const RunConfig& cfg)
{
    detail::require_lengths(cfg);
    check_scan_sizes(cfg.ns);
    Report rep;
    const QuadratureGrid grid = detail::tier_grid(cfg, rep);
    rep.config["gram_max"] = cfg.gram_max;
    ScanOptions opt;
    opt.gram_max = cfg.gram_max;
    opt.threads = cfg.threads;
    const AsymptoteScan scan = asymptote_scan(cfg.ns, grid, opt);
    rep.meta["ref_const"] = scan.reference_constant;
    for (const auto& r : scan.rows) {
        json row;
        row["N"] = r.N;
        row["I_VN"] = number(r.I_VN);
        row["I_logN"] = number(r.I_logN);
        row["d2_opt"] = number(r.d2_opt);
        row["d2_logN"] = number(r.d2_logN);
        row["quad_error"] = number(r.quad_error);
        row["tail"] = number(r.tail);
        row["t_max"] = r.t_max;
        row["ref_const"] = scan.reference_constant;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

inline Report run_gram_scan(const RunConfig& cfg)
{
    detail::require_lengths(cfg);
    for (std::size_t i = 0; i < cfg.ns.size(); ++i)
        if (cfg.ns[i] < 1 || (i > 0 && cfg.ns[i] <= cfg.ns[i - 1]))
            throw Error(ErrorKind::InvalidArgument, "--N must be positive and strictly ascending");
    Report rep;
    const QuadratureGrid grid = detail::tier_grid(cfg, rep);
    for (std::size_t n : cfg.ns) {
        const GramSystem sys = gram_assemble(n, grid, cfg.threads);
        const OptimalDistance best = optimal_dN2(sys);
        json row;
        row["N"] = n;
        row["d2_opt"] = number(best.d2);
        row["d2_logN"] = n > 1 ? number(best.d2 * std::log(static_cast<double>(n))) : json(nullptr);
        row["a1"] = best.coeffs.coeff(1);
        row["condition_estimate"] = number(best.condition_estimate);
        row["clamped"] = best.clamped;
        row["tail_weight"] = sys.tail_weight;
        row["t_max"] = sys.t_max;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

inline Report run_lemma31(const RunConfig& cfg)
{
    detail::require_lengths(cfg);
    Report rep;
    const ZeroTable table = detail::tier_zeros(cfg, rep);
    EvalAccuracy acc;
    acc.abs_tol = tier_preset(cfg.tier, 0).abs_tol;
    rep.config["s"] = detail::complex_json(cfg.s);
    for (std::size_t n : cfg.ns)
        for (double t : cfg.heights) {
            const Lemma31Result r = lemma31_residual(n, cfg.s, t, table, acc);
            json row;
            row["N"] = n;
            row["s"] = detail::complex_text(cfg.s);
            row["T"] = t;
            row["zeros_used"] = r.zeros_used;
            row["residual"] = number(r.residual);
            row["truncation_estimate"] = number(r.truncation_estimate);
            row["pass"] = r.pass;
            rep.rows.push_back(std::move(row));
        }
    return rep;
}

inline Report run_zero_sums(const RunConfig& cfg)
{
    Report rep;
    const ZeroTable table = detail::tier_zeros(cfg, rep);
    const double gonek = 6.0 / (kPi * kPi * kPi);
    rep.meta["ref_const"] = kNymanBeurlingConstant;
    for (double t : cfg.heights) {
        const double one_sided = sum_inv_zeta_prime_sq(table, t);
        const InvRhoSum inv = sum_inv_rho_sq(table, t);
        json row;
        row["T"] = t;
        row["zeros"] = table.count_below(t);
        row["inv_zeta_prime_sq_two_sided"] = number(2.0 * one_sided);
        row["gonek_ratio"] = number(2.0 * one_sided / (gonek * 2.0 * t));
        // The fit needs a decade of data above t = 100.
        row["exponent_fit"] = t >= 1000.0 ? number(zeta_prime_exponent_fit(table, 100.0, t)) : json(nullptr);
        row["inv_rho_sq_partial"] = number(inv.partial);
        row["inv_rho_sq_tail"] = number(inv.tail);
        row["inv_rho_sq_total"] = number(inv.total());
        row["ref_const"] = kNymanBeurlingConstant;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

inline Report run_poly_scan(const RunConfig& cfg)
{
    detail::require_lengths(cfg);
    if (cfg.poly.empty())
        throw Error(ErrorKind::InvalidArgument, "poly-scan needs --poly");
    const CirclePoly p(cfg.poly);
    if (p.is_zero())
        throw Error(ErrorKind::InvalidArgument, "--poly is the zero polynomial");
    Report rep;
    json coeffs = json::array();
    for (const Complex& c : p.coeffs())
        coeffs.push_back(detail::complex_json(c));
    rep.config["poly"] = coeffs;
    const auto roots = find_roots(p);
    const UnitZeroSet unit = UnitZeroSet::from_roots(roots);
    bool inside = false;
    for (const Complex& r : roots)
        inside = inside || std::abs(r) < 1.0 - UnitZeroSet::kRadiusTolerance;
    rep.meta["expected_limit"] = unit.multiplicity_square_sum();
    rep.meta["zeros_inside_disc"] = inside;
    const Theorem2Scan scan = theorem2_scan(p, unit, cfg.ns);
    for (const auto& r : scan.rows) {
        json row;
        row["N"] = r.n;
        row["delta2_WN"] = number(r.delta2_w);
        row["N_delta2_WN"] = number(r.n_delta2_w);
        row["delta2_opt"] = number(r.delta2_opt);
        row["N_delta2_opt"] = number(r.n_delta2_opt);
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

struct Lemma21Case {
    std::vector<Complex> roots;
    Complex s;
    std::size_t n = 0;
};

/// Simple roots with |r| in [1, 3] at least 0.3 apart, degree 1..6, s in the
/// closed unit disc at least 0.1 from every root, N in 1..64.
inline Lemma21Case sample_lemma21_case(std::mt19937_64& rng)
{
    std::uniform_int_distribution<std::size_t> degree(1, 6);
    std::uniform_int_distribution<std::size_t> length(1, 64);
    std::uniform_real_distribution<double> radius(1.0, 3.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    Lemma21Case c;
    const std::size_t d = degree(rng);
    while (c.roots.size() < d) {
        const Complex r = std::polar(radius(rng), angle(rng));
        if (std::all_of(c.roots.begin(), c.roots.end(), [&](Complex q) { return std::abs(q - r) >= 0.3; }))
            c.roots.push_back(r);
    }
    do {
        c.s = std::polar(std::sqrt(unit(rng)), angle(rng));
    } while (!std::all_of(c.roots.begin(), c.roots.end(), [&](Complex q) { return std::abs(c.s - q) >= 0.1; }));
    c.n = length(rng);
    return c;
}

inline Report run_lemma21_test(const RunConfig& cfg)
{
    if (cfg.count < 1)
        throw Error(ErrorKind::InvalidArgument, "--count must be >= 1");
    Report rep;
    rep.config["count"] = cfg.count;
    std::mt19937_64 rng(cfg.seed);
    double worst = 0.0;
    for (std::size_t k = 0; k < cfg.count; ++k) {
        const Lemma21Case c = sample_lemma21_case(rng);
        const CirclePoly p = poly_from_roots(c.roots);
        const Lemma21Check check = lemma21_check(p, c.roots, c.s, c.n);
        worst = std::max(worst, check.residual);
        json row;
        row["case"] = k;
        row["degree"] = p.degree();
        row["N"] = c.n;
        row["s"] = detail::complex_text(c.s);
        row["residual"] = number(check.residual);
        rep.rows.push_back(std::move(row));
    }
    rep.meta["max_residual"] = worst;
    return rep;
}

// ---------------------------------------------------------------- driver

inline const std::vector<std::string>& subcommand_names()
{
    static const std::vector<std::string> names{"vn-scan",  "gram-scan", "lemma31",
                                                "zero-sums", "poly-scan", "lemma21-test"};
    return names;
}

/// Flags beyond the common set that each subcommand consumes.
inline std::set<std::string> subcommand_flags(const std::string& name)
{
    if (name == "vn-scan")
        return {"--N", "--t-max", "--gram-max"};
    if (name == "gram-scan")
        return {"--N", "--t-max"};
    if (name == "lemma31")
        return {"--N", "--s", "--T", "--zeros", "--verify-zeros", "--t-cap"};
    if (name == "zero-sums")
        return {"--T", "--zeros", "--verify-zeros", "--t-cap"};
    if (name == "poly-scan")
        return {"--N", "--poly"};
    if (name == "lemma21-test")
        return {"--count"};
    return {};
}

inline Report dispatch(const RunConfig& cfg)
{
    if (cfg.subcommand == "vn-scan")
        return run_vn_scan(cfg);
    if (cfg.subcommand == "gram-scan")
        return run_gram_scan(cfg);
    if (cfg.subcommand == "lemma31")
        return run_lemma31(cfg);
    if (cfg.subcommand == "zero-sums")
        return run_zero_sums(cfg);
    if (cfg.subcommand == "poly-scan")
        return run_poly_scan(cfg);
    if (cfg.subcommand == "lemma21-test")
        return run_lemma21_test(cfg);
    throw Error(ErrorKind::InvalidArgument, "unknown subcommand " + cfg.subcommand);
}

inline void write_error(std::ostream& err, std::string_view kind, const std::string& message, int code)
{
    json rec;
    rec["error"] = kind;
    rec["message"] = message;
    rec["exit_code"] = code;
    err << rec.dump() << "\n";
}

inline constexpr const char* kTierHelp =
    "Accuracy tiers (abs_tol, t_max, Gauss-Legendre panel rule):\n"
    "  fast      1e-8,  1000,  8\n"
    "  standard  1e-10, 5000,  16   (default)\n"
    "  strict    1e-12, 5000,  16   for N <= 300\n"
    "            1e-12, 20000, 32   for N > 300\n"
    "--t-max overrides the tier's height. Results do not depend on --threads.\n"
    "--N accepts lists such as 50,200,1000, 10,20,...,100 or 1,2,4,...,4096.\n"
    "Exit codes: 0 success, 1 invalid input, 2 numeric failure\n"
    "(IllConditioned, AccuracyUnreachable); failures print one JSON record on stderr.";

/// Parses argv, runs one subcommand and writes its report. Output goes to
/// --output when given, else to `out`. Returns the exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Nyman-Beurling numerical laboratory", "nblab"};
    app.footer(kTierHelp);
    app.require_subcommand(1, 1);

    RunConfig cfg;
    std::string n_text;
    std::string s_text;
    std::string t_text;
    std::string poly_text;
    std::string tier_text = "standard";

    app.add_option("--N", n_text, "Polynomial lengths, comma-separated, optional ellipsis");
    app.add_option("--t-max", cfg.t_max, "Height of the critical-line quadrature (overrides the tier)");
    app.add_option("--zeros", cfg.zeros_path, "Zero-ordinate table, one gamma per line")->capture_default_str();
    app.add_flag("--verify-zeros,!--no-verify-zeros", cfg.verify_zeros,
                 "Check |zeta(rho)| and the zero count on load (default on)");
    app.add_option("--t-cap", cfg.t_cap, "Ignore table zeros above this height");
    app.add_option("--s", s_text, "Complex point, e.g. 0.6+5i");
    app.add_option("--T", t_text, "Zero-sum heights, comma-separated (default 1000)");
    app.add_option("--poly", poly_text, "Coefficients c_0,c_1,... of P; complex entries allowed");
    app.add_option("--gram-max", cfg.gram_max, "Largest N for the Gram solve in vn-scan")->capture_default_str();
    app.add_option("--count", cfg.count, "Random cases for lemma21-test")->capture_default_str();
    app.add_option("--output,-o", cfg.output, "Output file (default: standard output)");
    app.add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    app.add_flag("--deterministic", cfg.deterministic, "Omit wall-clock fields so reruns are byte-identical");
    app.add_option("--accuracy", tier_text, "Accuracy tier")
        ->check(CLI::IsMember({"fast", "standard", "strict"}))
        ->capture_default_str();
    app.add_option("--threads", cfg.threads, "Worker threads (0: all cores)")->capture_default_str();

    app.add_subcommand("vn-scan", "I(V_N), I(V_N) log N and optimal d_N^2 over --N")->fallthrough();
    app.add_subcommand("gram-scan", "Optimal d_N^2 from the Gram system over --N")->fallthrough();
    app.add_subcommand("lemma31", "Residual of the exact zero expansion of V_N(s)")->fallthrough();
    app.add_subcommand("zero-sums", "Sums over zeros: 1/|zeta'(rho)|^2 and 1/|rho|^2")->fallthrough();
    app.add_subcommand("poly-scan", "N delta_N^2 on the unit circle for W_N and the optimal Q_N")->fallthrough();
    app.add_subcommand("lemma21-test", "Random checks of the W_N / Y_N identity")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        write_error(err, "InvalidArgument", e.what(), 1);
        return 1;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        cfg.subcommand = app.get_subcommands().front()->get_name();
        const std::set<std::string> common{"--output", "--format", "--seed", "--deterministic", "--accuracy",
                                           "--threads"};
        const std::set<std::string> allowed = subcommand_flags(cfg.subcommand);
        for (const CLI::Option* opt : app.get_options()) {
            if (opt->count() == 0 || opt->get_name() == "--help")
                continue;
            const std::string name = opt->get_name();
            if (!common.contains(name) && !allowed.contains(name))
                throw Error(ErrorKind::InvalidArgument, name + " is not used by " + cfg.subcommand);
        }
        cfg.tier = tier_text == "fast" ? Tier::Fast : tier_text == "strict" ? Tier::Strict : Tier::Standard;
        if (!n_text.empty())
            cfg.ns = parse_length_list(n_text);
        if (!s_text.empty())
            cfg.s = parse_complex(s_text);
        else if (cfg.subcommand == "lemma31")
            throw Error(ErrorKind::InvalidArgument, "lemma31 needs --s");
        if (!t_text.empty())
            cfg.heights = parse_real_list(t_text, "--T");
        if (!poly_text.empty())
            cfg.poly = parse_complex_list(poly_text);
        if (!std::isnan(cfg.t_max) && !(cfg.t_max > 0.0))
            throw Error(ErrorKind::InvalidArgument, "--t-max must be positive");

        std::ofstream file;
        if (!cfg.output.empty()) {
            file.open(cfg.output, std::ios::binary | std::ios::trunc);
            if (!file)
                throw Error(ErrorKind::InvalidArgument, "cannot write " + cfg.output);
        }

        Report rep = dispatch(cfg);
        json config;
        config["subcommand"] = cfg.subcommand;
        config["accuracy"] = tier_name(cfg.tier);
        config["seed"] = cfg.seed;
        config["deterministic"] = cfg.deterministic;
        if (!cfg.ns.empty())
            config["N"] = cfg.ns;
        for (const auto& [key, value] : rep.config.items())
            config[key] = value;
        if (cfg.subcommand == "lemma31" || cfg.subcommand == "zero-sums")
            config["T"] = cfg.heights;
        rep.config = std::move(config);
        if (!cfg.deterministic)
            rep.meta["runtime_s"] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        const std::string text = cfg.format == "json" ? render_json(cfg.subcommand, rep) : render_csv(rep);
        std::ostream& sink = cfg.output.empty() ? out : file;
        sink << text;
        sink.flush();
        if (!sink)
            throw Error(ErrorKind::InvalidArgument, "write failed");
        return 0;
    } catch (const Error& e) {
        const int code = is_numeric_failure(e.kind()) ? 2 : 1;
        write_error(err, kind_name(e.kind()), e.what(), code);
        return code;
    } catch (const std::exception& e) {
        write_error(err, "InvalidArgument", e.what(), 1);
        return 1;
    }
}

}  // namespace nblab::app
