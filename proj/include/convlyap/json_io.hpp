/**
 * @file json_io.hpp
 * @brief JSON encodings of polynomials, certificates, Gram forms, reports and
 *        SOS exports.
 *
 * A polynomial is a list of terms {"e": [e0, e1, ..., en], "c": [num, den]}
 * with e0 the t-exponent. num and den are JSON integers when they fit in 62
 * bits and decimal strings otherwise; the decoder accepts either.
 */
#pragma once

#include "convlyap/bounds.hpp"
#include "convlyap/dynamics.hpp"
#include "convlyap/lyapunov.hpp"
#include "convlyap/sos_export.hpp"
#include "convlyap/verify.hpp"

#include <json.hpp>

#include <cmath>
#include <string>

namespace convlyap {

using Json = nlohmann::ordered_json;

struct JsonFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Json big_to_json(const BigInt& v)
{
    if (fits_int64(v)) return to_int64(v);
    return v.get_str();
}

inline BigInt big_from_json(const Json& j)
{
    if (j.is_number_integer()) return BigInt(std::to_string(j.get<std::int64_t>()));
    if (j.is_string()) {
        BigInt v;
        if (v.set_str(j.get<std::string>(), 10) != 0) throw JsonFormatError("malformed integer string");
        return v;
    }
    throw JsonFormatError("expected an integer or integer string");
}

inline Json to_json(const Rational& r) { return Json::array({big_to_json(r.get_num()), big_to_json(r.get_den())}); }

inline Rational rational_from_json(const Json& j)
{
    if (!j.is_array() || j.size() != 2) throw JsonFormatError("rational must be [num, den]");
    const BigInt den = big_from_json(j[1]);
    if (den == 0) throw JsonFormatError("zero denominator");
    Rational r(big_from_json(j[0]), den);
    r.canonicalize();
    return r;
}

inline Json to_json(const Polynomial& p)
{
    Json terms = Json::array();
    for (const auto& t : p.terms()) {
        Json e = Json::array();
        for (std::size_t s = 0; s <= p.nvars(); ++s) e.push_back(t.mono[s]);
        terms.push_back({{"e", std::move(e)}, {"c", to_json(t.coeff)}});
    }
    return terms;
}

/// nvars is required to decode the zero polynomial (an empty term list).
inline Polynomial polynomial_from_json(const Json& j, std::optional<std::size_t> nvars = std::nullopt)
{
    if (!j.is_array()) throw JsonFormatError("polynomial must be a list of terms");
    std::optional<std::size_t> n = nvars;
    std::vector<Term> terms;
    for (const auto& t : j) {
        if (!t.is_object() || !t.contains("e") || !t.contains("c")) throw JsonFormatError("term needs \"e\" and \"c\"");
        const auto& e = t["e"];
        if (!e.is_array() || e.empty()) throw JsonFormatError("exponent list must be nonempty");
        if (!n) n = e.size() - 1;
        if (e.size() != *n + 1) throw JsonFormatError("exponent lists have inconsistent lengths");
        Monomial m;
        for (std::size_t s = 0; s < e.size(); ++s) {
            if (!e[s].is_number_unsigned()) throw JsonFormatError("exponents must be nonnegative integers");
            m.set(s, e[s].get<std::uint32_t>());
        }
        terms.push_back({m, rational_from_json(t["c"])});
    }
    if (!n) throw JsonFormatError("cannot infer the variable count of an empty polynomial");
    return Polynomial::from_terms(*n, std::move(terms));
}

inline Json to_json(const RationalMatrix& M)
{
    Json flat = Json::array();
    for (std::size_t i = 0; i < M.size(); ++i)
        for (std::size_t j = 0; j < M.size(); ++j) flat.push_back(to_json(M(i, j)));
    return {{"size", M.size()}, {"entries", std::move(flat)}};
}

inline RationalMatrix matrix_from_json(const Json& j)
{
    const std::size_t n = j.at("size").get<std::size_t>();
    const auto& flat = j.at("entries");
    if (flat.size() != n * n) throw JsonFormatError("matrix entry count does not match its size");
    RationalMatrix M(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) M(i, k) = rational_from_json(flat[i * n + k]);
    return M;
}

inline Json to_json(const GramForm& g)
{
    Json blocks = Json::array();
    for (const auto& b : g.blocks) {
        Json basis = Json::array();
        for (const auto& p : b.basis) basis.push_back(to_json(p));
        blocks.push_back({{"piece", b.piece}, {"width", to_json(b.width)}, {"basis", std::move(basis)}, {"M", to_json(b.M)}});
    }
    return {{"blocks", std::move(blocks)}};
}

inline GramForm gram_from_json(const Json& j, std::size_t nvars)
{
    GramForm g;
    for (const auto& b : j.at("blocks")) {
        GramBlock block;
        block.piece = b.at("piece").get<std::size_t>();
        block.width = rational_from_json(b.at("width"));
        for (const auto& p : b.at("basis")) block.basis.push_back(polynomial_from_json(p, nvars));
        block.M = matrix_from_json(b.at("M"));
        g.blocks.push_back(std::move(block));
    }
    return g;
}

/// Non-finite doubles become null.
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json to_json(const StabilityData& d)
{
    return {{"K", d.K}, {"lambda", d.lambda}, {"L", d.L}, {"r", d.r}, {"q", d.q}};
}

inline Json to_json(const Condition& c)
{
    return {{"name", c.name}, {"lhs", number(c.lhs)}, {"rhs", number(c.rhs)}, {"holds", c.holds}, {"residual", number(c.residual())}};
}

inline Json to_json(const BoundCertificate& c)
{
    Json conds = Json::array();
    for (const auto& x : c.conditions) conds.push_back(to_json(x));
    return {{"data", to_json(c.data)},
            {"delta_mode", to_string(c.mode)},
            {"T", c.T},
            {"N", c.N},
            {"k", c.k},
            {"delta", c.delta},
            {"c_k", number(c.c_k)},
            {"cond1_lhs", number(c.cond1_lhs)},
            {"cond1_rhs", number(c.cond1_rhs)},
            {"cond2_lhs", number(c.cond2_lhs)},
            {"cond2_rhs", number(c.cond2_rhs)},
            {"degree_bound", big_to_json(c.degree_bound)},
            {"slack", c.slack},
            {"conditions", std::move(conds)}};
}

inline Json to_json(const State& x)
{
    Json a = Json::array();
    for (double v : x) a.push_back(v);
    return a;
}

inline Json to_json(const VerificationReport& r)
{
    auto witnesses = [](const std::vector<WitnessPoint>& w) {
        Json a = Json::array();
        for (const auto& p : w) a.push_back({{"x", to_json(p.x)}, {"value", p.value}});
        return a;
    };
    return {{"alpha_hat", r.alpha_hat},
            {"beta_hat", r.beta_hat},
            {"gamma_hat", r.gamma_hat},
            {"n_samples", r.n_samples},
            {"radius", r.radius},
            {"tolerance", r.tolerance},
            {"verdict", r.decreasing ? "decreasing" : "not decreasing"},
            {"positive", r.positive},
            {"worst_points", {{"alpha", witnesses(r.worst_alpha)}, {"beta", witnesses(r.worst_beta)}, {"gamma", witnesses(r.worst_gamma)}}}};
}

inline Json to_json(const EstimateReport& r)
{
    Json j = {{"K_hat", r.K_hat},         {"lambda_hat", r.lambda_hat}, {"L_hat", r.L_hat},
              {"r", r.r},                 {"samples", r.samples},       {"fit_residual", r.fit_residual},
              {"lambda_min", number(r.lambda_min)}, {"lambda_max", number(r.lambda_max)}, {"stable", r.stable()}};
    j["unstable_start"] = r.unstable_start ? to_json(*r.unstable_start) : Json(nullptr);
    return j;
}

inline Json to_json(const VectorField& f)
{
    Json comps = Json::array();
    for (const auto& c : f.components()) comps.push_back(to_json(c));
    return comps;
}

inline Json to_json(const SosProblemExport& ex)
{
    Json basis = Json::array(), text = Json::array();
    for (const auto& m : ex.basis) {
        Json e = Json::array();
        for (std::size_t i = 1; i <= ex.n; ++i) e.push_back(m[i]);
        basis.push_back(std::move(e));
        text.push_back(to_string(Polynomial::monomial(ex.n, m, 1)));
    }
    Json mults = Json::array();
    for (const auto& m : ex.multipliers)
        mults.push_back({{"name", m.name}, {"half_degree", m.half_degree}, {"basis_size", big_to_json(m.basis_size)}});
    Json cons = Json::array();
    for (const auto& c : ex.constraints) cons.push_back({{"role", c.role}, {"identity", c.identity}, {"multipliers", c.multipliers}});
    return {{"form", to_string(ex.form)},
            {"n", ex.n},
            {"d", ex.d},
            {"degree", 2 * ex.d},
            {"basis_size", big_to_json(ex.basis_size)},
            {"objective", nullptr},
            {"radius", ex.radius},
            {"basis", std::move(basis)},
            {"basis_text", std::move(text)},
            {"f", to_json(ex.f)},
            {"g", to_json(ex.g)},
            {"variables", {{"P", {{"kind", "psd"}, {"size", big_to_json(ex.basis_size)}}}, {"scalars", {"alpha", "beta", "gamma"}}}},
            {"multipliers", std::move(mults)},
            {"constraints", std::move(cons)}};
}

}  // namespace convlyap
