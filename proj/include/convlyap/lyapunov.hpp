/**
 * @file lyapunov.hpp
 * @brief The converse Lyapunov polynomial V(x) = int_0^delta |G^k(s,x)|^2 ds
 *        and its Gram-block sum-of-squares certificate.
 */
#pragma once

#include "convlyap/ldlt.hpp"
#include "convlyap/picard.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace convlyap {

/// One block of a Gram form: basis^T M basis, with M the s-moment matrix (x) I_n.
struct GramBlock {
    std::size_t piece = 0;     ///< index of the piece this block integrates
    Rational width;            ///< integration length in local time
    std::vector<Polynomial> basis;
    RationalMatrix M;
};

struct GramForm {
    std::vector<GramBlock> blocks;

    /// sum_i basis_i^T M_i basis_i, expanded.
    Polynomial expand(std::size_t nvars) const
    {
        PolynomialAccumulator acc(nvars);
        for (const auto& b : blocks) {
            const std::size_t m = b.basis.size();
            if (b.M.size() != m) throw DimensionMismatch("Gram block basis and matrix sizes differ");
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = i; j < m; ++j) {
                    const Rational& c = b.M(i, j);
                    if (c == 0) continue;
                    acc.add_scaled(b.basis[i] * b.basis[j], i == j ? c : 2 * c);
                }
            }
        }
        return acc.finish();
    }
};

struct LyapunovResult {
    Polynomial V;
    Rational delta;
    std::size_t pieces_used = 0;
    GramForm gram;
};

/// H[a][b] = (hi^{a+b+1} - lo^{a+b+1}) / (a+b+1) for a, b < size.
inline RationalMatrix moment_matrix(std::size_t size, const Rational& lo, const Rational& hi)
{
    RationalMatrix H(size);
    for (std::size_t a = 0; a < size; ++a)
        for (std::size_t b = 0; b < size; ++b) {
            const unsigned long e = a + b + 1;
            H(a, b) = (pow(hi, e) - pow(lo, e)) / Rational(e);
        }
    return H;
}

namespace detail {

// Integration widths for pieces covering [0, delta]; the last one may be short.
inline std::vector<Rational> piece_widths(const PiecewiseApprox& g, const Rational& delta)
{
    if (delta <= 0) throw std::invalid_argument("delta must be positive");
    if (delta > g.T() * g.N()) throw std::domain_error("delta exceeds N T, the span of the approximation");
    std::vector<Rational> widths;
    Rational left = delta;
    while (left > 0) {
        widths.push_back(left < g.T() ? left : g.T());
        left -= widths.back();
    }
    return widths;
}

// Coefficient of t^j in p, as a t-free polynomial.
inline std::vector<Polynomial> split_by_t(const Polynomial& p, std::uint32_t t_degree)
{
    std::vector<std::vector<Term>> parts(t_degree + 1);
    for (const auto& term : p.terms()) parts[term.mono.t_degree()].push_back({term.mono.x_part(), term.coeff});
    std::vector<Polynomial> out;
    out.reserve(parts.size());
    for (auto& part : parts) out.push_back(Polynomial::from_terms(p.nvars(), std::move(part)));
    return out;
}

}  // namespace detail

/**
 * Per piece i, G_i(s, x) = sum_a s^a R_{i,a}(x) with R_{i,a} in R^n. The basis
 * stacks (R_{i,0}, R_{i,1}, ...) coordinate by coordinate, so the block is the
 * moment matrix over [0, w_i] tensored with I_n.
 */
inline GramForm gram_extract(const PiecewiseApprox& g, const Rational& delta)
{
    const auto widths = detail::piece_widths(g, delta);
    const std::size_t n = g.dim();
    GramForm form;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        const auto& piece = g.piece(i);
        const std::uint32_t m = piece.t_degree();
        std::vector<std::vector<Polynomial>> coeffs;  // [component][power]
        for (const auto& c : piece.components()) coeffs.push_back(detail::split_by_t(c, m));
        GramBlock block;
        block.piece = i;
        block.width = widths[i];
        for (std::uint32_t a = 0; a <= m; ++a)
            for (std::size_t j = 0; j < n; ++j) block.basis.push_back(coeffs[j][a]);
        block.M = moment_matrix(m + 1, 0, widths[i]).kron_identity(n);
        form.blocks.push_back(std::move(block));
    }
    return form;
}

/// V by direct integration of |G_i|^2 over each piece, plus its Gram form.
inline LyapunovResult construct_V(const VectorField& f, const PiecewiseApprox& g, const Rational& delta)
{
    if (g.dim() != f.n()) throw DimensionMismatch("approximation dimension does not match the vector field");
    const auto widths = detail::piece_widths(g, delta);
    const std::size_t n = f.n();
    Polynomial V(n);
    for (std::size_t i = 0; i < widths.size(); ++i) {
        const auto& comps = g.piece(i).components();
        V += integrate_t(dot(comps, comps), 0, widths[i]);
    }
    return {std::move(V), delta, widths.size(), gram_extract(g, delta)};
}

/// The N = 1, k = 2 case in closed form: basis (x, f(x)), block [[d, d^2/2], [d^2/2, d^3/3]] (x) I.
inline LyapunovResult closed_form_quadratic(const VectorField& f, const Rational& delta)
{
    if (delta <= 0) throw std::invalid_argument("delta must be positive");
    const std::size_t n = f.n();
    GramBlock block;
    block.width = delta;
    for (std::size_t j = 0; j < n; ++j) block.basis.push_back(Polynomial::variable(n, j + 1));
    for (std::size_t j = 0; j < n; ++j) block.basis.push_back(f[j]);
    block.M = moment_matrix(2, 0, delta).kron_identity(n);

    std::vector<Polynomial> x(block.basis.begin(), block.basis.begin() + std::ptrdiff_t(n));
    const auto& fc = f.components();
    Polynomial V = dot(x, x) * delta + dot(x, fc) * (delta * delta) + dot(fc, fc) * (delta * delta * delta / 3);
    LyapunovResult res{std::move(V), delta, 1, {}};
    res.gram.blocks.push_back(std::move(block));
    return res;
}

struct GramCheck {
    bool reconstructs = false;
    std::vector<PsdResult> blocks;
    bool all_psd() const
    {
        for (const auto& b : blocks)
            if (!b.psd) return false;
        return true;
    }
    bool ok() const { return reconstructs && all_psd(); }
};

/// Exact PSD test of every block and term-for-term reconstruction of V.
inline GramCheck check_gram(const LyapunovResult& res)
{
    GramCheck out;
    for (const auto& b : res.gram.blocks) out.blocks.push_back(psd_check(b.M));
    out.reconstructs = res.gram.expand(res.V.nvars()) == res.V;
    return out;
}

}  // namespace convlyap
