/**
 * @file sos_export.hpp
 * @brief Problem data for the SOS Lyapunov feasibility search of a given
 *        degree 2d on the ball g(x) = r^2 - |x|^2 >= 0. Nothing is solved here.
 */
#pragma once

#include "convlyap/vector_field.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace convlyap {

enum class SosForm { FourMultiplier, ThreeMultiplier };

inline const char* to_string(SosForm f) { return f == SosForm::FourMultiplier ? "thm3" : "thm5"; }

struct SosMultiplier {
    std::string name;
    std::uint32_t half_degree = 0;
    BigInt basis_size;  ///< C(n + half_degree, n)
};

struct SosConstraint {
    std::string role;  ///< lower_bound, upper_bound or derivative
    std::string identity;
    std::vector<std::string> multipliers;
};

struct SosProblemExport {
    SosForm form = SosForm::FourMultiplier;
    std::size_t n = 0;
    std::uint32_t d = 0;  ///< half-degree of V
    BigInt basis_size;    ///< (n + d)! / (n! d!)
    double radius = 0.0;
    std::vector<Monomial> basis;  ///< Z(x): every x-monomial of degree <= d, graded-lex ascending
    VectorField f;
    Polynomial g;  ///< r^2 - |x|^2
    std::vector<SosMultiplier> multipliers;
    std::vector<SosConstraint> constraints;
};

inline BigInt binomial(std::uint64_t n, std::uint64_t k)
{
    BigInt out;
    mpz_bin_uiui(out.get_mpz_t(), n, k);
    return out;
}

/// Every monomial in x1..xn of total degree <= d, in graded-lex order.
inline std::vector<Monomial> monomials_up_to(std::size_t n, std::uint32_t d)
{
    std::vector<Monomial> out;
    std::vector<std::uint32_t> e(n, 0);
    auto rec = [&](auto&& self, std::size_t slot, std::uint32_t left) -> void {
        if (slot == n) {
            Monomial m;
            for (std::size_t i = 0; i < n; ++i) m.set(i + 1, e[i]);
            out.push_back(m);
            return;
        }
        for (std::uint32_t p = 0; p <= left; ++p) {
            e[slot] = p;
            self(self, slot + 1, left - p);
        }
        e[slot] = 0;
    };
    rec(rec, 0, d);
    std::sort(out.begin(), out.end());
    return out;
}

/**
 * degree is 2d and must be even and positive. The four-multiplier form keeps a
 * ball multiplier on the lower bound; the three-multiplier form drops it since
 * V may be taken SOS, and shifts the derivative condition by alpha |x|^2.
 */
inline SosProblemExport export_sos(const VectorField& f, double radius, std::uint32_t degree, SosForm form)
{
    if (degree == 0 || degree % 2 != 0) throw std::invalid_argument("degree must be a positive even integer");
    if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
    SosProblemExport ex;
    ex.form = form;
    ex.n = f.n();
    ex.d = degree / 2;
    ex.basis_size = binomial(ex.n + ex.d, ex.d);
    ex.radius = radius;
    ex.basis = monomials_up_to(ex.n, ex.d);
    ex.f = f;

    const Rational r = from_double(radius);
    ex.g = Polynomial::constant(ex.n, r * r);
    for (std::size_t i = 1; i <= ex.n; ++i) ex.g -= pow(Polynomial::variable(ex.n, i), 2);

    // grad V . f has degree 2d - 1 + q; its multipliers take the even ceiling.
    const std::uint32_t q = std::max<std::uint32_t>(f.q(), 1);
    const std::uint32_t deriv_half = (degree - 1 + q + 1) / 2;
    auto mult = [&](std::string name, std::uint32_t half) {
        ex.multipliers.push_back({std::move(name), half, binomial(ex.n + half, half)});
    };

    if (form == SosForm::FourMultiplier) {
        mult("s1", ex.d);
        mult("s2", ex.d - 1);
        mult("s3", deriv_half);
        mult("s4", deriv_half - 1);
        ex.constraints = {
            {"lower_bound", "Z(x)^T P Z(x) - alpha |x|^2 = s1(x) + g(x) s2(x)", {"s1", "s2"}},
            {"upper_bound", "beta |x|^2 - Z(x)^T P Z(x) >= 0 on g >= 0, holds for some beta since P >= 0 and V(0) = 0", {}},
            {"derivative", "-grad(Z(x)^T P Z(x))^T f(x) - gamma |x|^2 = s3(x) + g(x) s4(x)", {"s3", "s4"}},
        };
    } else {
        mult("s1", ex.d);
        mult("s2", deriv_half);
        mult("s3", deriv_half - 1);
        ex.constraints = {
            {"lower_bound", "Z(x)^T P Z(x) - alpha |x|^2 = s1(x)", {"s1"}},
            {"upper_bound", "beta |x|^2 - Z(x)^T P Z(x) >= 0 on g >= 0, holds for some beta since P >= 0 and V(0) = 0", {}},
            {"derivative", "-grad(Z(x)^T P Z(x) + alpha |x|^2)^T f(x) - gamma |x|^2 = s2(x) + g(x) s3(x)", {"s2", "s3"}},
        };
    }
    return ex;
}

}  // namespace convlyap
