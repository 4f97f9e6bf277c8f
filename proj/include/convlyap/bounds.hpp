/**
 * @file bounds.hpp
 * @brief Feasibility conditions for the converse SOS degree bound, the
 *        error sum c(k), the (T, N, k) search, and the quadratic test.
 *
 * All condition arithmetic is double precision. Strict inequalities a < b are
 * accepted only when a < b - slack * max(|a|, |b|) with slack = 1e-12, so a
 * certificate never rests on a rounding tie.
 */
#pragma once

#include "convlyap/picard.hpp"
#include "convlyap/rational.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace convlyap {

inline constexpr double kStrictSlack = 1e-12;

struct StabilityData {
    double K = 1.0;       ///< overshoot, >= 1
    double lambda = 1.0;  ///< decay rate, > 0
    double L = 1.0;       ///< Lipschitz bound of f on B_{4Kr}, > 0
    double r = 1.0;       ///< region radius, > 0
    std::uint32_t q = 1;  ///< field degree, >= 1

    void validate() const
    {
        if (!(K >= 1.0) || !std::isfinite(K)) throw std::invalid_argument("K must be a finite value >= 1");
        if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
        if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("L must be positive");
        if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("r must be positive");
        if (q < 1) throw std::invalid_argument("q must be at least 1");
    }

    /// The integration horizon fixed by the proof: log(2K^2) / (2 lambda).
    double canonical_delta() const { return std::log(2.0 * K * K) / (2.0 * lambda); }
};

enum class DeltaMode { Canonical, Swept };

inline const char* to_string(DeltaMode m) { return m == DeltaMode::Canonical ? "canonical" : "swept"; }

/// One strict inequality lhs < rhs and whether it held under the slack rule.
struct Condition {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    double residual() const { return rhs - lhs; }
};

inline bool strictly_less(double a, double b, double slack = kStrictSlack)
{
    return a < b - slack * std::max(std::abs(a), std::abs(b));
}

struct BoundCertificate {
    StabilityData data;
    DeltaMode mode = DeltaMode::Canonical;
    double T = 0.0;
    int N = 0;
    int k = 0;
    double delta = 0.0;
    double c_k = 0.0;
    double cond1_lhs = 0.0;  ///< canonical: < 1/2; swept: derivative condition < 1
    double cond1_rhs = 0.0;
    double cond2_lhs = 0.0;  ///< canonical: c(k)^2; swept: delta K c(k)^2
    double cond2_rhs = 0.0;
    BigInt degree_bound;
    double slack = kStrictSlack;
    std::vector<Condition> conditions;
};

struct ConditionReport {
    BoundCertificate values;
    std::vector<Condition> violated;
    bool feasible() const { return violated.empty(); }
};

/// c(k) = sum_{i<N} (e^{TL} + K (TL)^k)^i K^2 (TL)^k.
inline double c_of_k(double K, double T, double L, int k, int N)
{
    if (k < 1 || N < 1) throw std::invalid_argument("c(k) needs k >= 1 and N >= 1");
    const double d = T * L;
    if (!(d < 1.0)) throw std::domain_error("c(k) requires T L < 1");
    if (!(d > 0.0)) throw std::invalid_argument("c(k) requires T L > 0");
    const double dk = std::pow(d, k);
    const double ratio = std::exp(d) + K * dk;
    double sum = 0.0, power = 1.0;
    for (int i = 0; i < N; ++i) {
        sum += power;
        power *= ratio;
    }
    return sum * K * K * dk;
}

/// 2 q^{Nk-1} exactly; 2 when q = 1.
inline BigInt degree_formula(std::uint32_t q, std::uint64_t N, std::uint64_t k)
{
    if (q < 1 || N < 1 || k < 1) throw std::invalid_argument("degree formula needs q, N, k >= 1");
    return 2 * x_degree_bound(q, N, k);
}

/// N = ceil(delta / T), bumped until N T > delta holds under the slack rule.
inline int pieces_for(double delta, double T)
{
    double ratio = std::ceil(delta / T);
    if (ratio < 1.0) ratio = 1.0;
    if (ratio > 1e9) throw std::domain_error("interval count overflow");
    int N = static_cast<int>(ratio);
    while (!strictly_less(delta, N * T)) ++N;
    return N;
}

/**
 * Evaluates every condition of the degree-bound theorem at (T, N, k). With a
 * delta override the swept-delta conditions are used instead of the ones
 * obtained by substituting the canonical delta.
 */
inline ConditionReport check_conditions(const StabilityData& data, double T, int N, int k,
                                        std::optional<double> delta_override = std::nullopt)
{
    data.validate();
    if (!(T > 0.0) || N < 1 || k < 1) throw std::invalid_argument("check_conditions needs T > 0, N >= 1, k >= 1");
    const double K = data.K, L = data.L, lambda = data.lambda;

    ConditionReport report;
    auto& c = report.values;
    c.data = data;
    c.T = T;
    c.N = N;
    c.k = k;
    c.mode = delta_override ? DeltaMode::Swept : DeltaMode::Canonical;
    c.delta = delta_override ? *delta_override : data.canonical_delta();
    if (!(c.delta > 0.0)) throw std::invalid_argument("delta must be positive");

    auto add = [&](std::string name, double lhs, double rhs) {
        Condition cond{std::move(name), lhs, rhs, strictly_less(lhs, rhs)};
        if (!cond.holds) report.violated.push_back(cond);
        c.conditions.push_back(std::move(cond));
    };

    add("T < 1/(2L)", T, 1.0 / (2.0 * L));
    add("delta < N T", c.delta, N * T);

    const double d = T * L;
    if (!(d < 1.0)) {
        // c(k) diverges outside the contraction regime; report it as violated.
        c.c_k = std::numeric_limits<double>::infinity();
        add("c(k) < K", c.c_k, K);
        c.degree_bound = degree_formula(data.q, N, k);
        return report;
    }
    c.c_k = c_of_k(K, T, L, k, N);
    const double ck = c.c_k;
    const double defect = std::pow(d, k) / T * (1.0 + ck) * (K + ck);
    add("c(k) < K", ck, K);

    if (c.mode == DeltaMode::Canonical) {
        const double log2k2 = std::log(2.0 * K * K);
        c.cond1_lhs = ck * ck + log2k2 / (2.0 * lambda) * K * defect;
        c.cond1_rhs = 0.5;
        c.cond2_lhs = ck * ck;
        c.cond2_rhs = lambda / (K * L * log2k2) * (1.0 - std::pow(2.0 * K * K, -L / lambda));
        add("decrease: c^2 + delta K (TL)^k/T (1+c)(K+c) < 1/2", c.cond1_lhs, c.cond1_rhs);
        add("positivity: c^2 < lambda/(K L log 2K^2) (1 - (2K^2)^(-L/lambda))", c.cond2_lhs, c.cond2_rhs);
    } else {
        const double delta = c.delta;
        c.cond1_lhs = K * K * std::exp(-2.0 * lambda * delta) + ck * ck + 2.0 * delta * K * defect;
        c.cond1_rhs = 1.0;
        c.cond2_lhs = delta * K * ck * ck;
        c.cond2_rhs = (1.0 - std::exp(-2.0 * L * delta)) / (2.0 * L);
        add("decrease: K^2 e^(-2 lambda delta) + c^2 + 2 delta K (TL)^k/T (1+c)(K+c) < 1", c.cond1_lhs, c.cond1_rhs);
        add("positivity: delta K c^2 < (1 - e^(-2 L delta))/(2L)", c.cond2_lhs, c.cond2_rhs);
    }
    c.degree_bound = degree_formula(data.q, N, k);
    return report;
}

struct SearchOptions {
    int t_grid = 64;
    int k_max = 30;
    bool free_delta = false;
    int delta_grid = 64;
    /// Swept deltas cover (0, delta_span * canonical delta].
    double delta_span = 4.0;
};

struct SearchOutcome {
    std::optional<BoundCertificate> best;
    std::size_t evaluated = 0;
    bool feasible() const { return best.has_value(); }
};

/// T_j = j / (grid + 1) * 1 / (2L), j = 1..grid: uniform and strictly inside (0, 1/(2L)).
inline std::vector<double> t_grid(double L, int grid)
{
    std::vector<double> out;
    for (int j = 1; j <= grid; ++j) out.push_back(double(j) / double(grid + 1) / (2.0 * L));
    return out;
}

/**
 * Sweeps T (and delta, in free mode), takes the smallest feasible k for each
 * grid point, and keeps the certificate with the smallest N k; ties go to the
 * smaller k, then the smaller N, then the earlier grid point.
 */
inline SearchOutcome search_bound(const StabilityData& data, const SearchOptions& opt = {})
{
    data.validate();
    if (opt.t_grid < 1 || opt.k_max < 1) throw std::invalid_argument("search needs t_grid >= 1 and k_max >= 1");
    if (opt.free_delta && opt.delta_grid < 1) throw std::invalid_argument("search needs delta_grid >= 1");

    std::vector<std::optional<double>> deltas;
    if (opt.free_delta) {
        const double hi = opt.delta_span * data.canonical_delta();
        for (int m = 1; m <= opt.delta_grid; ++m) deltas.emplace_back(hi * double(m) / double(opt.delta_grid));
    } else {
        deltas.emplace_back(std::nullopt);
    }

    SearchOutcome out;
    auto key = [](const BoundCertificate& c) { return std::make_tuple(std::int64_t(c.N) * c.k, c.k, c.N); };
    for (double T : t_grid(data.L, opt.t_grid)) {
        for (const auto& delta : deltas) {
            const double horizon = delta ? *delta : data.canonical_delta();
            const int N = pieces_for(horizon, T);
            for (int k = 1; k <= opt.k_max; ++k) {
                if (out.best && std::int64_t(N) * k > std::int64_t(out.best->N) * out.best->k) break;
                auto report = check_conditions(data, T, N, k, delta);
                ++out.evaluated;
                if (!report.feasible()) continue;
                if (!out.best || key(report.values) < key(*out.best)) out.best = std::move(report.values);
                break;
            }
        }
    }
    return out;
}

struct QuadraticReport {
    bool feasible = false;
    double delta = 0.0;    ///< first feasible delta, or the minimizer when infeasible
    double lhs = 0.0;      ///< left-hand side at delta
    double min_lhs = 0.0;  ///< smallest left-hand side seen on the grid
    int evaluated = 0;
};

/**
 * Sufficient condition for x^T x to be a Lyapunov function: some delta in
 * (0, 1/(2L)) with K delta L < 1 and
 * K^2 e^{-2 lambda delta} + c1^2 + 2 K delta L (1 + c1)(K + c1) < 1,
 * where c1 = K^2 delta L.
 */
inline QuadraticReport quadratic_test(const StabilityData& data, int delta_grid = 1000)
{
    data.validate();
    if (delta_grid < 1) throw std::invalid_argument("quadratic test needs a grid of at least one point");
    const double K = data.K, L = data.L, lambda = data.lambda;
    QuadraticReport rep;
    rep.min_lhs = std::numeric_limits<double>::infinity();
    for (double delta : t_grid(L, delta_grid)) {
        if (!strictly_less(K * delta * L, 1.0)) continue;
        const double c1 = K * K * delta * L;
        const double lhs = K * K * std::exp(-2.0 * lambda * delta) + c1 * c1 + 2.0 * K * delta * L * (1.0 + c1) * (K + c1);
        ++rep.evaluated;
        if (lhs < rep.min_lhs) {
            rep.min_lhs = lhs;
            rep.delta = delta;
            rep.lhs = lhs;
        }
        if (strictly_less(lhs, 1.0)) {
            rep.feasible = true;
            rep.delta = delta;
            rep.lhs = lhs;
            return rep;
        }
    }
    return rep;
}

}  // namespace convlyap
