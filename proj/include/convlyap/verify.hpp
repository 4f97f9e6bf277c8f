/**
 * @file verify.hpp
 * @brief Sampled checks of the Lyapunov inequalities and of the four
 *        approximation bounds behind the construction, against the RK4 oracle.
 *
 * Lyapunov checks evaluate V and grad V . f exactly in rational arithmetic at
 * each sample (doubles convert to rationals without rounding), so a sign
 * verdict never depends on cancellation error. Lemma checks compare double
 * evaluations against the bound plus an absolute oracle slack.
 */
#pragma once

#include "convlyap/bounds.hpp"
#include "convlyap/dynamics.hpp"
#include "convlyap/picard.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace convlyap {

inline constexpr double kOracleSlack = 1e-6;

/**
 * Quasi-uniform nonzero points of the closed ball of radius r: Halton points
 * of the cube [-1, 1]^n kept when inside the unit ball, scaled by r, followed
 * by the axis points +-c e_i for c in {0.1 r, 0.5 r, r} when include_axes.
 */
inline std::vector<State> ball_points(std::size_t n, double r, std::size_t count, bool include_axes = true)
{
    std::vector<State> out;
    for (std::size_t i = 1; out.size() < count; ++i) {
        State z(n);
        for (std::size_t d = 0; d < n; ++d) z[d] = 2 * radical_inverse(i, kPrimes[d]) - 1;
        const double s = norm2(z);
        if (s > 1.0 || s < 1e-12) continue;
        for (double& v : z) v *= r;
        out.push_back(std::move(z));
    }
    if (include_axes) {
        for (double scale : {0.1, 0.5, 1.0})
            for (std::size_t d = 0; d < n; ++d)
                for (double sign : {1.0, -1.0}) {
                    State z(n, 0.0);
                    z[d] = sign * scale * r;
                    out.push_back(std::move(z));
                }
    }
    return out;
}

struct WitnessPoint {
    State x;
    double value = 0.0;
};

struct VerificationReport {
    double alpha_hat = 0.0;  ///< min V / |x|^2
    double beta_hat = 0.0;   ///< max V / |x|^2
    double gamma_hat = 0.0;  ///< -max (grad V . f) / |x|^2
    std::size_t n_samples = 0;
    double radius = 0.0;
    double tolerance = 0.0;
    bool decreasing = false;  ///< gamma_hat > tolerance, decided exactly
    bool positive = false;    ///< alpha_hat > 0, decided exactly
    std::vector<WitnessPoint> worst_alpha, worst_beta, worst_gamma;
};

/// grad V . f as a polynomial in x.
inline Polynomial lie_derivative(const Polynomial& V, const VectorField& f)
{
    if (V.nvars() != f.n()) throw DimensionMismatch("V and f have different numbers of variables");
    Polynomial out(f.n());
    for (std::size_t i = 0; i < f.n(); ++i) out += differentiate(V, i + 1) * f[i];
    return out;
}

/**
 * Extremes of V/|x|^2 and (grad V . f)/|x|^2 over ball_points(n, radius,
 * n_samples). The verdicts compare exact rationals with the tolerance, so a
 * sample where grad V . f vanishes exactly makes the field "not decreasing".
 */
inline VerificationReport check_lyapunov(const Polynomial& V, const VectorField& f, double radius,
                                         std::size_t n_samples = 1000, double tolerance = 0.0)
{
    if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
    if (V.nvars() != f.n()) throw DimensionMismatch("V and f have different numbers of variables");
    if (V.has_t()) throw std::invalid_argument("V must not depend on t");
    if (V.coefficient(Monomial{}) != 0) throw std::invalid_argument("V(0) must be 0");
    const Polynomial Vdot = lie_derivative(V, f);
    const std::size_t n = f.n();

    struct Row {
        State x;
        Rational v, vd;
    };
    std::vector<Row> rows;
    for (auto& x : ball_points(n, radius, n_samples)) {
        std::vector<Rational> q;
        Rational nsq = 0;
        for (double c : x) {
            q.push_back(from_double(c));
            nsq += q.back() * q.back();
        }
        std::span<const Rational> pt(q);
        rows.push_back({std::move(x), evaluate<Rational>(V, pt) / nsq, evaluate<Rational>(Vdot, pt) / nsq});
    }

    VerificationReport rep;
    rep.n_samples = rows.size();
    rep.radius = radius;
    rep.tolerance = tolerance;
    auto worst = [&](auto less) {
        std::vector<const Row*> ptrs;
        for (const auto& r : rows) ptrs.push_back(&r);
        const std::size_t m = std::min<std::size_t>(5, ptrs.size());
        std::partial_sort(ptrs.begin(), ptrs.begin() + std::ptrdiff_t(m), ptrs.end(),
                          [&](const Row* a, const Row* b) { return less(*a, *b); });
        ptrs.resize(m);
        return ptrs;
    };
    const auto lo = worst([](const Row& a, const Row& b) { return a.v < b.v; });
    const auto hi = worst([](const Row& a, const Row& b) { return a.v > b.v; });
    const auto gd = worst([](const Row& a, const Row& b) { return a.vd > b.vd; });
    for (auto* r : lo) rep.worst_alpha.push_back({r->x, to_double(r->v)});
    for (auto* r : hi) rep.worst_beta.push_back({r->x, to_double(r->v)});
    for (auto* r : gd) rep.worst_gamma.push_back({r->x, -to_double(r->vd)});

    const Rational gamma = -gd.front()->vd;
    rep.alpha_hat = to_double(lo.front()->v);
    rep.beta_hat = to_double(hi.front()->v);
    rep.gamma_hat = to_double(gamma);
    rep.decreasing = gamma > from_double(tolerance);
    rep.positive = lo.front()->v > 0;
    return rep;
}

/// One row of a lemma check: the worst sampled margin of lhs <= bound + slack.
struct LemmaRow {
    int k = 0;
    std::size_t points = 0;
    double worst_lhs = 0.0;    ///< lhs at the worst point
    double worst_bound = 0.0;  ///< bound at the worst point
    double worst_margin = std::numeric_limits<double>::infinity();  ///< min of bound + slack - lhs
    State worst_x;
    double worst_t = 0.0;
    bool skipped = false;
    std::string reason;
    bool pass() const { return !skipped && worst_margin >= 0.0; }

    void record(double lhs, double bound, double slack, std::span<const double> x, double t)
    {
        ++points;
        const double margin = bound + slack - lhs;
        if (margin < worst_margin) {
            worst_margin = margin;
            worst_lhs = lhs;
            worst_bound = bound;
            worst_x.assign(x.begin(), x.end());
            worst_t = t;
        }
    }
};

struct LemmaTable {
    std::string lemma;
    bool precondition_ok = true;
    std::vector<std::string> precondition_notes;
    double slack = kOracleSlack;
    std::vector<LemmaRow> rows;

    void require(bool ok, std::string note)
    {
        if (!ok) precondition_ok = false;
        precondition_notes.push_back((ok ? "ok: " : "violated: ") + std::move(note));
    }

    bool pass() const
    {
        if (!precondition_ok || rows.empty()) return false;
        return std::all_of(rows.begin(), rows.end(), [](const LemmaRow& r) { return r.pass() || r.skipped; }) &&
               std::any_of(rows.begin(), rows.end(), [](const LemmaRow& r) { return !r.skipped; });
    }
    std::size_t min_points() const
    {
        std::size_t m = std::numeric_limits<std::size_t>::max();
        for (const auto& r : rows)
            if (!r.skipped) m = std::min(m, r.points);
        return m == std::numeric_limits<std::size_t>::max() ? 0 : m;
    }
};

struct LemmaOptions {
    std::size_t n_samples = 60;     ///< initial states in B_r
    std::size_t times_per_piece = 10;  ///< time subintervals per width-T interval
    double h = 1e-3;                 ///< largest RK4 step
    std::size_t grid_per_dim = 101;  ///< grid for the L and Q estimates
    double slack = kOracleSlack;
};

namespace detail {

// RK4 states at t = j T / m for j = 0..m*pieces, with the internal step refined so it divides T / m.
inline std::vector<State> oracle_on_grid(const CompiledField& f, std::span<const double> x0, double T,
                                         std::size_t m, std::size_t pieces, double h)
{
    const double dt = T / double(m);
    const auto sub = static_cast<std::size_t>(std::max(1.0, std::ceil(dt / h)));
    const double step = dt / double(sub);
    std::vector<State> out{State(x0.begin(), x0.end())};
    for (std::size_t j = 0; j < m * pieces; ++j) {
        State x = out.back();
        for (std::size_t s = 0; s < sub; ++s) x = rk4_step(f, x, step);
        out.push_back(std::move(x));
    }
    return out;
}

inline double distance(std::span<const double> a, std::span<const double> b)
{
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

inline std::vector<CompiledPolynomial> compile(const PolyTrajectory& y)
{
    std::vector<CompiledPolynomial> out;
    for (const auto& c : y.components()) out.emplace_back(c);
    return out;
}

inline State eval(const std::vector<CompiledPolynomial>& y, double t, std::span<const double> x)
{
    State out;
    for (const auto& c : y) out.push_back(c(t, x));
    return out;
}

}  // namespace detail

/**
 * Contraction of the Picard iteration: sup_t |phi - P^k z| <= (TL)^k sup_t |phi|
 * on [0, T] for x in B_r, k in [k_lo, k_hi]. L and Q (sup |f|) are estimated on
 * B_{2r}; the precondition T < min(r/Q, 1/L) is reported.
 */
inline LemmaTable check_contraction(const VectorField& f, double r, double T, int k_lo, int k_hi,
                                    const LemmaOptions& opt = {})
{
    if (k_lo < 1 || k_hi < k_lo) throw std::invalid_argument("need 1 <= k_lo <= k_hi");
    LemmaTable table;
    table.lemma = "contraction";
    table.slack = opt.slack;
    const double L = estimate_L(f, 2 * r, opt.grid_per_dim);
    const double Q = estimate_Q(f, 2 * r, opt.grid_per_dim);
    table.require(T < 1.0 / L, "T < 1/L with L = " + std::to_string(L) + " on B_2r");
    table.require(Q == 0.0 || T < r / Q, "T < r/Q with Q = " + std::to_string(Q) + " on B_2r");

    const CompiledField cf(f);
    const auto xs = ball_points(f.n(), r, opt.n_samples);
    std::vector<std::vector<State>> oracle;
    for (const auto& x : xs) oracle.push_back(detail::oracle_on_grid(cf, x, T, opt.times_per_piece, 1, opt.h));

    for (int k = k_lo; k <= k_hi; ++k) {
        const auto iter = detail::compile(picard_iterate(f, k));
        LemmaRow row;
        row.k = k;
        const double factor = std::pow(T * L, k);
        for (std::size_t s = 0; s < xs.size(); ++s) {
            double sup_phi = 0.0;
            for (const auto& st : oracle[s]) sup_phi = std::max(sup_phi, norm2(st));
            for (std::size_t j = 0; j < oracle[s].size(); ++j) {
                const double t = T * double(j) / double(opt.times_per_piece);
                const State p = detail::eval(iter, t, xs[s]);
                row.record(detail::distance(p, oracle[s][j]), factor * sup_phi, opt.slack, xs[s], t);
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

/**
 * Extension error: |G^k(s, x) - phi(s, x)| <= c(k) |x| for s in [0, N T] and
 * x in B_r. Skipped when c(k) >= K. The supplied L is compared with the
 * estimate on B_{4Kr}, and the supplied K with the sampled overshoot.
 */
inline LemmaTable check_extension(const VectorField& f, const StabilityData& data, double T, int N, int k,
                                  const LemmaOptions& opt = {})
{
    data.validate();
    LemmaTable table;
    table.lemma = "extension";
    table.slack = opt.slack;
    const double r = data.r;
    const double L_est = estimate_L(f, 4 * data.K * r, opt.grid_per_dim);
    table.require(L_est <= data.L, "L = " + std::to_string(data.L) + " bounds the estimate " + std::to_string(L_est) +
                                       " on B_4Kr");
    table.require(T * data.L < 1.0, "T L < 1");

    LemmaRow row;
    row.k = k;
    const double c = T * data.L < 1.0 ? c_of_k(data.K, T, data.L, k, N) : std::numeric_limits<double>::infinity();
    if (!(c < data.K)) {
        row.skipped = true;
        row.reason = "c(k) = " + std::to_string(c) + " is not below K";
        table.rows.push_back(std::move(row));
        return table;
    }

    const CompiledField cf(f);
    const ChainedEvaluator G(picard_iterate(f, k), T, std::size_t(N));
    double overshoot = 0.0;
    for (const auto& x : ball_points(f.n(), r, opt.n_samples)) {
        const auto phi = detail::oracle_on_grid(cf, x, T, opt.times_per_piece, std::size_t(N), opt.h);
        const double nx = norm2(x);
        for (std::size_t j = 0; j < phi.size(); ++j) {
            const double s = std::min(T * double(j) / double(opt.times_per_piece), T * N);
            overshoot = std::max(overshoot, norm2(phi[j]) / nx);
            row.record(detail::distance(G(s, x), phi[j]), c * nx, opt.slack, x, s);
        }
    }
    table.require(overshoot <= data.K, "|phi(s,x)| <= K |x| on samples (max ratio " + std::to_string(overshoot) + ")");
    table.rows.push_back(std::move(row));
    return table;
}

/**
 * Derivative defect of the Picard iterates: |y_k(t, x)| <= (TL)^k / T |x| for
 * (t, x) in [0, T] x B_r. L is the caller's Lipschitz bound, compared with the
 * estimate on B_{2r}.
 */
inline LemmaTable check_derivative_defect(const VectorField& f, double T, double L, int k_lo, int k_hi, double r,
                                          const LemmaOptions& opt = {})
{
    if (k_lo < 1 || k_hi < k_lo) throw std::invalid_argument("need 1 <= k_lo <= k_hi");
    LemmaTable table;
    table.lemma = "derivative defect";
    table.slack = opt.slack;
    const double L_est = estimate_L(f, 2 * r, opt.grid_per_dim);
    const double Q = estimate_Q(f, 2 * r, opt.grid_per_dim);
    table.require(L_est <= L, "L = " + std::to_string(L) + " bounds the estimate " + std::to_string(L_est) + " on B_2r");
    table.require(T < 1.0 / L, "T < 1/L");
    table.require(Q == 0.0 || T < r / Q, "T < r/Q with Q = " + std::to_string(Q) + " on B_2r");

    const auto xs = ball_points(f.n(), r, opt.n_samples);
    for (int k = k_lo; k <= k_hi; ++k) {
        const auto defect = detail::compile(derivative_defect(f, picard_iterate(f, k)));
        LemmaRow row;
        row.k = k;
        const double factor = std::pow(T * L, k) / T;
        for (const auto& x : xs)
            for (std::size_t j = 0; j <= opt.times_per_piece; ++j) {
                const double t = T * double(j) / double(opt.times_per_piece);
                row.record(norm2(detail::eval(defect, t, x)), factor * norm2(x), opt.slack, x, t);
            }
        table.rows.push_back(std::move(row));
    }
    return table;
}

/**
 * Piecewise derivative defect: for every piece of g,
 * |J_x G_i(t, x) f(x) - d/dt G_i(t, x)| <= (TL)^k / T (K + c(k)) |x| on
 * [0, T] x B_r. Skipped when c(k) >= K.
 */
inline LemmaTable check_piecewise_defect(const VectorField& f, const StabilityData& data, const PiecewiseApprox& g,
                                         const LemmaOptions& opt = {})
{
    data.validate();
    LemmaTable table;
    table.lemma = "piecewise derivative defect";
    table.slack = opt.slack;
    const double T = to_double(g.T());
    const int k = g.k();
    const int N = int(g.N());
    const double L_est = estimate_L(f, 4 * data.K * data.r, opt.grid_per_dim);
    table.require(L_est <= data.L, "L = " + std::to_string(data.L) + " bounds the estimate " + std::to_string(L_est) +
                                       " on B_4Kr");
    table.require(T * data.L < 1.0, "T L < 1");

    LemmaRow row;
    row.k = k;
    const double c = T * data.L < 1.0 ? c_of_k(data.K, T, data.L, k, N) : std::numeric_limits<double>::infinity();
    if (!(c < data.K)) {
        row.skipped = true;
        row.reason = "c(k) = " + std::to_string(c) + " is not below K";
        table.rows.push_back(std::move(row));
        return table;
    }
    const double factor = std::pow(T * data.L, k) / T * (data.K + c);
    const auto xs = ball_points(f.n(), data.r, opt.n_samples);
    for (std::size_t i = 0; i < g.N(); ++i) {
        const auto defect = detail::compile(derivative_defect(f, g.piece(i)));
        for (const auto& x : xs)
            for (std::size_t j = 0; j <= opt.times_per_piece; ++j) {
                const double t = T * double(j) / double(opt.times_per_piece);
                row.record(norm2(detail::eval(defect, t, x)), factor * norm2(x), opt.slack, x, t + T * double(i));
            }
    }
    table.rows.push_back(std::move(row));
    return table;
}

}  // namespace convlyap
