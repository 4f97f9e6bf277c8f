/**
 * @file picard.hpp
 * @brief Picard iteration on polynomial trajectories and its piecewise
 *        extension over consecutive time intervals.
 *
 * A trajectory candidate y(t, x) is a vector of polynomials in (t, x). The
 * Picard operator maps it to x + integral_0^t f(y(s, x)) ds. Starting from
 * y = 0, k applications give a polynomial approximation of the flow on
 * [0, T]. The extension restarts the same k-fold iterate from the end state
 * of the previous interval, giving N pieces that cover [0, N T].
 */
#pragma once

#include "convlyap/polynomial.hpp"
#include "convlyap/vector_field.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace convlyap {

class PolyTrajectory {
public:
    PolyTrajectory() = default;
    explicit PolyTrajectory(std::vector<Polynomial> components) : components_(std::move(components))
    {
        for (const auto& c : components_)
            if (c.nvars() != components_.size()) throw DimensionMismatch("trajectory component count must equal nvars");
    }

    /// The trajectory that is identically zero (the Picard seed).
    static PolyTrajectory zero(std::size_t n) { return PolyTrajectory(std::vector<Polynomial>(n, Polynomial(n))); }

    std::size_t dim() const { return components_.size(); }
    const std::vector<Polynomial>& components() const { return components_; }
    const Polynomial& operator[](std::size_t i) const { return components_[i]; }

    std::uint32_t x_degree() const
    {
        std::uint32_t d = 0;
        for (const auto& c : components_) d = std::max(d, c.x_degree());
        return d;
    }
    std::uint32_t t_degree() const
    {
        std::uint32_t d = 0;
        for (const auto& c : components_) d = std::max(d, c.t_degree());
        return d;
    }
    std::size_t term_count() const
    {
        std::size_t s = 0;
        for (const auto& c : components_) s += c.size();
        return s;
    }

    /// The state at a fixed time, as polynomials in x alone.
    std::vector<Polynomial> at_time(const Rational& t) const
    {
        std::vector<Polynomial> out;
        out.reserve(dim());
        for (const auto& c : components_) out.push_back(evaluate_t(c, t));
        return out;
    }

    bool operator==(const PolyTrajectory&) const = default;

private:
    std::vector<Polynomial> components_;
};

/// Thrown when a piecewise approximation would exceed the configured term cap.
class TermCapExceeded : public std::runtime_error {
public:
    TermCapExceeded(BigInt bound_degree, std::uint64_t predicted_degree, double predicted_terms, std::size_t cap)
        : std::runtime_error("term cap " + std::to_string(cap) + " exceeded: predicted " +
                             std::to_string(static_cast<long double>(predicted_terms)) + " terms, x-degree " +
                             std::to_string(predicted_degree) + " (degree bound q^(Nk-1) = " + bound_degree.get_str() +
                             ")"),
          bound_degree_(std::move(bound_degree)), predicted_degree_(predicted_degree), predicted_terms_(predicted_terms),
          cap_(cap)
    {
    }
    const BigInt& bound_degree() const { return bound_degree_; }
    std::uint64_t predicted_degree() const { return predicted_degree_; }
    double predicted_terms() const { return predicted_terms_; }
    std::size_t cap() const { return cap_; }

private:
    BigInt bound_degree_;
    std::uint64_t predicted_degree_;
    double predicted_terms_;
    std::size_t cap_;
};

inline constexpr std::size_t kDefaultTermCap = 2'000'000;

/// q^(pieces*k - 1): the x-degree bound for the last of `pieces` pieces.
inline BigInt x_degree_bound(std::uint32_t q, std::uint64_t pieces, std::uint64_t k)
{
    if (q == 0 || pieces == 0 || k == 0) throw std::invalid_argument("x_degree_bound needs q, pieces, k >= 1");
    return pow_int(q, pieces * k - 1);
}

/// (P y)(t, x) = x + integral_0^t f(y(s, x)) ds.
inline PolyTrajectory picard_step(const VectorField& f, const PolyTrajectory& y)
{
    const std::size_t n = f.n();
    if (y.dim() != n) throw DimensionMismatch("trajectory dimension does not match the vector field");
    Substitution subst(y.components());
    std::vector<Polynomial> next;
    next.reserve(n);
    for (std::size_t j = 0; j < n; ++j)
        next.push_back(Polynomial::variable(n, j + 1) + indefinite_integrate_t(subst.apply(f[j])));
    return PolyTrajectory(std::move(next));
}

/// k-fold Picard iterate from the zero seed.
inline PolyTrajectory picard_iterate(const VectorField& f, int k)
{
    if (k < 1) throw std::invalid_argument("Picard iteration count must be at least 1");
    PolyTrajectory y = PolyTrajectory::zero(f.n());
    for (int i = 0; i < k; ++i) y = picard_step(f, y);
    return y;
}

/**
 * Exact per-component x-degrees of P^k z predicted by propagating degrees
 * through the support of f: deg (P y)_j = max(1, max over monomials m of f_j
 * of sum_l m_l deg y_l). This is an upper bound that is attained unless
 * leading terms cancel.
 */
inline std::vector<std::uint64_t> predicted_iterate_degrees(const VectorField& f, int k)
{
    std::vector<std::uint64_t> deg(f.n(), 0);
    for (int step = 0; step < k; ++step) {
        std::vector<std::uint64_t> next(f.n(), 1);
        for (std::size_t j = 0; j < f.n(); ++j)
            for (const auto& t : f[j].terms()) {
                std::uint64_t d = 0;
                for (std::size_t l = 0; l < f.n(); ++l) d += std::uint64_t(t.mono[l + 1]) * deg[l];
                next[j] = std::max(next[j], d);
            }
        deg = std::move(next);
    }
    return deg;
}

/// Same propagation through a substitution x -> g with per-component degrees g_deg.
inline std::vector<std::uint64_t> predicted_composed_degrees(const PolyTrajectory& outer,
                                                             const std::vector<std::uint64_t>& g_deg)
{
    std::vector<std::uint64_t> out(outer.dim(), 0);
    for (std::size_t j = 0; j < outer.dim(); ++j)
        for (const auto& t : outer[j].terms()) {
            std::uint64_t d = 0;
            for (std::size_t l = 0; l < outer.dim(); ++l) d += std::uint64_t(t.mono[l + 1]) * g_deg[l];
            out[j] = std::max(out[j], d);
        }
    return out;
}

/**
 * Piecewise approximation G^k over [0, N T]. Piece i is used on
 * [iT, iT + T] in local time t - iT; piece i+1 is piece 0 with x replaced by
 * piece i evaluated at t = T.
 */
class PiecewiseApprox {
public:
    PiecewiseApprox(std::vector<PolyTrajectory> pieces, Rational T, int k)
        : pieces_(std::move(pieces)), T_(std::move(T)), k_(k)
    {
        if (pieces_.empty()) throw std::invalid_argument("piecewise approximation needs at least one piece");
        if (T_ <= 0) throw std::invalid_argument("interval width must be positive");
        for (const auto& p : pieces_) {
            std::vector<CompiledPolynomial> c;
            for (const auto& comp : p.components()) c.emplace_back(comp);
            compiled_.push_back(std::move(c));
        }
    }

    const std::vector<PolyTrajectory>& pieces() const { return pieces_; }
    const PolyTrajectory& piece(std::size_t i) const { return pieces_.at(i); }
    const Rational& T() const { return T_; }
    int k() const { return k_; }
    std::size_t N() const { return pieces_.size(); }
    std::size_t dim() const { return pieces_.front().dim(); }

    /// Double evaluation of piece i at local time t.
    std::vector<double> eval_piece(std::size_t i, double t, std::span<const double> x) const
    {
        std::vector<double> out;
        out.reserve(dim());
        for (const auto& c : compiled_.at(i)) out.push_back(c(t, x));
        return out;
    }

private:
    std::vector<PolyTrajectory> pieces_;
    Rational T_;
    int k_;
    std::vector<std::vector<CompiledPolynomial>> compiled_;
};

namespace detail {

inline double binomial_double(std::uint64_t n, std::uint64_t k)
{
    return std::exp(std::lgamma(double(n) + 1) - std::lgamma(double(k) + 1) - std::lgamma(double(n - k) + 1));
}

// Dense term-count bound for one piece: (t-degree + 1) * C(D + n, n) per component.
inline double predicted_terms(const std::vector<std::uint64_t>& degrees, std::uint32_t t_degree, std::size_t n)
{
    double total = 0;
    for (auto d : degrees) total += (double(t_degree) + 1) * binomial_double(d + n, n);
    return total;
}

}  // namespace detail

inline PiecewiseApprox extend(const VectorField& f, int k, int N, const Rational& T,
                              std::size_t term_cap = kDefaultTermCap)
{
    if (k < 1) throw std::invalid_argument("Picard iteration count must be at least 1");
    if (N < 1) throw std::invalid_argument("piece count must be at least 1");
    if (T <= 0) throw std::invalid_argument("interval width must be positive");
    const std::size_t n = f.n();
    const std::uint32_t q = std::max<std::uint32_t>(f.q(), 1);

    auto fail = [&](const std::vector<std::uint64_t>& degrees, double terms) {
        std::uint64_t d = 0;
        for (auto v : degrees) d = std::max(d, v);
        throw TermCapExceeded(x_degree_bound(q, std::uint64_t(N), std::uint64_t(k)), d, terms, term_cap);
    };

    std::vector<PolyTrajectory> pieces;
    pieces.push_back(picard_iterate(f, k));
    const PolyTrajectory base = pieces.front();
    if (base.term_count() > term_cap) fail(predicted_iterate_degrees(f, k), double(base.term_count()));

    std::vector<std::uint64_t> degrees = predicted_iterate_degrees(f, k);
    for (int i = 1; i < N; ++i) {
        degrees = predicted_composed_degrees(base, degrees);
        const double terms = detail::predicted_terms(degrees, base.t_degree(), n);
        if (terms > double(term_cap)) fail(degrees, terms);
        Substitution subst(pieces.back().at_time(T));
        std::vector<Polynomial> comps;
        comps.reserve(n);
        for (const auto& c : base.components()) comps.push_back(subst.apply(c));
        pieces.emplace_back(std::move(comps));
        if (pieces.back().term_count() > term_cap) fail(degrees, double(pieces.back().term_count()));
    }
    return PiecewiseApprox(std::move(pieces), T, k);
}

/// Predicted x-degrees of every piece of extend(f, k, N, .), without building it.
inline std::vector<std::vector<std::uint64_t>> predicted_piece_degrees(const VectorField& f, int k, int N)
{
    const auto base = picard_iterate(f, k);
    std::vector<std::vector<std::uint64_t>> out{predicted_iterate_degrees(f, k)};
    for (int i = 1; i < N; ++i) out.push_back(predicted_composed_degrees(base, out.back()));
    return out;
}

/**
 * G^k(s, x) for s in [0, N T]: piece floor(s / T) at local time s - i T, with
 * s = N T mapped to the last piece.
 */
inline std::vector<double> eval_G(const PiecewiseApprox& g, double s, std::span<const double> x)
{
    const double T = to_double(g.T());
    const double end = T * double(g.N());
    if (!(s >= 0.0) || s > end) throw std::out_of_range("time outside [0, N T]");
    auto i = static_cast<std::size_t>(std::floor(s / T));
    if (i >= g.N()) i = g.N() - 1;
    return g.eval_piece(i, s - double(i) * T, x);
}

/**
 * Evaluates G^k by chaining numeric evaluations of piece 0; agrees with
 * eval_G up to rounding but never builds the composed pieces, so it works
 * for configurations whose symbolic pieces would exceed the term cap.
 */
class ChainedEvaluator {
public:
    ChainedEvaluator(const PolyTrajectory& base, double T, std::size_t N) : T_(T), N_(N)
    {
        if (T <= 0 || N == 0) throw std::invalid_argument("chained evaluator needs T > 0 and N >= 1");
        for (const auto& c : base.components()) base_.emplace_back(c);
    }

    std::vector<double> operator()(double s, std::span<const double> x) const
    {
        if (!(s >= 0.0) || s > T_ * double(N_)) throw std::out_of_range("time outside [0, N T]");
        auto i = static_cast<std::size_t>(std::floor(s / T_));
        if (i >= N_) i = N_ - 1;
        std::vector<double> state(x.begin(), x.end());
        for (std::size_t p = 0; p < i; ++p) state = step(T_, state);
        return step(s - double(i) * T_, state);
    }

private:
    std::vector<double> step(double t, const std::vector<double>& x) const
    {
        std::vector<double> out;
        out.reserve(base_.size());
        for (const auto& c : base_) out.push_back(c(t, x));
        return out;
    }

    double T_;
    std::size_t N_;
    std::vector<CompiledPolynomial> base_;
};

/// y(t, x) = (d/dx y) f(x) - d/dt y, exactly.
inline PolyTrajectory derivative_defect(const VectorField& f, const PolyTrajectory& y)
{
    const std::size_t n = f.n();
    if (y.dim() != n) throw DimensionMismatch("trajectory dimension does not match the vector field");
    std::vector<Polynomial> out;
    out.reserve(n);
    for (const auto& comp : y.components()) {
        Polynomial d = -differentiate(comp, 0);
        for (std::size_t l = 0; l < n; ++l) d += differentiate(comp, l + 1) * f[l];
        out.push_back(std::move(d));
    }
    return PolyTrajectory(std::move(out));
}

}  // namespace convlyap
