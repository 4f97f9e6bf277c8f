/**
 * @file polynomial.hpp
 * @brief Sparse multivariate polynomials over the rationals in (t, x1..xn).
 *
 * Every polynomial carries n state variables plus the scalar time variable t.
 * Monomials store the t exponent in slot 0 and the x exponents in slots 1..n.
 * Terms are kept sorted in graded-lex order with no zero coefficients, so two
 * polynomials are equal exactly when their term vectors are equal.
 */
#pragma once

#include "convlyap/rational.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

namespace convlyap {

inline constexpr std::size_t kMaxVariables = 15;

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

class Monomial {
public:
    static constexpr std::size_t kSlots = kMaxVariables + 1;

    Monomial() = default;
    Monomial(std::initializer_list<std::uint32_t> exponents)
    {
        if (exponents.size() > kSlots) throw std::out_of_range("too many monomial slots");
        std::size_t i = 0;
        for (auto e : exponents) set(i++, e);
    }

    static Monomial from_span(std::span<const std::uint32_t> exponents)
    {
        if (exponents.size() > kSlots) throw std::out_of_range("too many monomial slots");
        Monomial m;
        for (std::size_t i = 0; i < exponents.size(); ++i) m.set(i, exponents[i]);
        return m;
    }

    static Monomial unit(std::size_t slot, std::uint32_t power = 1)
    {
        Monomial m;
        m.set(slot, power);
        return m;
    }

    std::uint32_t operator[](std::size_t slot) const { return e_[slot]; }
    std::uint32_t degree() const { return degree_; }
    std::uint32_t t_degree() const { return e_[0]; }
    std::uint32_t x_degree() const { return degree_ - e_[0]; }

    void set(std::size_t slot, std::uint32_t value)
    {
        if (slot >= kSlots) throw std::out_of_range("monomial slot out of range");
        degree_ = degree_ - e_[slot] + value;
        e_[slot] = value;
    }

    /// Same exponents with slot 0 cleared.
    Monomial x_part() const
    {
        Monomial m = *this;
        m.set(0, 0);
        return m;
    }

    Monomial& operator*=(const Monomial& other)
    {
        for (std::size_t i = 0; i < kSlots; ++i) e_[i] += other.e_[i];
        degree_ += other.degree_;
        return *this;
    }
    friend Monomial operator*(Monomial a, const Monomial& b) { return a *= b; }

    bool operator==(const Monomial&) const = default;

    std::size_t hash() const noexcept
    {
        std::uint64_t h = 1469598103934665603ull;
        for (auto e : e_) {
            h ^= e;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }

    /// Graded lex: total degree first, then x1..xn, then t.
    friend bool operator<(const Monomial& a, const Monomial& b)
    {
        if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
        for (std::size_t i = 1; i < kSlots; ++i)
            if (a.e_[i] != b.e_[i]) return a.e_[i] < b.e_[i];
        return a.e_[0] < b.e_[0];
    }

private:
    std::array<std::uint32_t, kSlots> e_{};
    std::uint32_t degree_ = 0;
};

struct MonomialHash {
    std::size_t operator()(const Monomial& m) const noexcept { return m.hash(); }
};

struct Term {
    Monomial mono;
    Rational coeff;
    bool operator==(const Term& o) const { return mono == o.mono && coeff == o.coeff; }
};

class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::size_t nvars) : nvars_(nvars) { check_nvars(nvars); }

    static Polynomial constant(std::size_t nvars, const Rational& c)
    {
        Polynomial p(nvars);
        if (c != 0) p.terms_.push_back({Monomial{}, c});
        return p;
    }

    /// slot 0 is t, slot i in 1..n is x_i.
    static Polynomial variable(std::size_t nvars, std::size_t slot)
    {
        if (slot > nvars) throw std::out_of_range("variable slot out of range");
        Polynomial p(nvars);
        p.terms_.push_back({Monomial::unit(slot), Rational(1)});
        return p;
    }

    static Polynomial monomial(std::size_t nvars, const Monomial& m, const Rational& c)
    {
        Polynomial p(nvars);
        p.check_monomial(m);
        if (c != 0) p.terms_.push_back({m, c});
        return p;
    }

    /// Merges duplicate monomials and drops zeros.
    static Polynomial from_terms(std::size_t nvars, std::vector<Term> terms)
    {
        Polynomial p(nvars);
        for (const auto& t : terms) p.check_monomial(t.mono);
        std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.mono < b.mono; });
        for (auto& t : terms) {
            if (!p.terms_.empty() && p.terms_.back().mono == t.mono)
                p.terms_.back().coeff += t.coeff;
            else
                p.terms_.push_back(std::move(t));
        }
        std::erase_if(p.terms_, [](const Term& t) { return t.coeff == 0; });
        return p;
    }

    std::size_t nvars() const { return nvars_; }
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    Rational coefficient(const Monomial& m) const
    {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                                   [](const Term& t, const Monomial& key) { return t.mono < key; });
        return (it != terms_.end() && it->mono == m) ? it->coeff : Rational(0);
    }

    /// Degree of the zero polynomial is 0.
    std::uint32_t degree() const { return max_over([](const Monomial& m) { return m.degree(); }); }
    std::uint32_t x_degree() const { return max_over([](const Monomial& m) { return m.x_degree(); }); }
    std::uint32_t t_degree() const { return max_over([](const Monomial& m) { return m.t_degree(); }); }
    bool has_t() const { return t_degree() > 0; }

    bool operator==(const Polynomial& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

    Polynomial operator-() const
    {
        Polynomial r = *this;
        for (auto& t : r.terms_) t.coeff = -t.coeff;
        return r;
    }

    Polynomial& operator+=(const Polynomial& o) { return *this = merge(*this, o, false); }
    Polynomial& operator-=(const Polynomial& o) { return *this = merge(*this, o, true); }
    Polynomial& operator*=(const Rational& c)
    {
        if (c == 0) {
            terms_.clear();
        } else {
            for (auto& t : terms_) t.coeff *= c;
        }
        return *this;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) { return merge(a, b, false); }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return merge(a, b, true); }
    friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
    friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

    /// Multiplies every term by a monomial (no coefficient change).
    Polynomial shifted(const Monomial& m) const
    {
        Polynomial r = *this;
        for (auto& t : r.terms_) t.mono *= m;
        check_monomial(m);
        return r;
    }

private:
    friend class PolynomialAccumulator;

    static void check_nvars(std::size_t n)
    {
        if (n > kMaxVariables)
            throw std::invalid_argument("at most " + std::to_string(kMaxVariables) + " state variables are supported");
    }

    void check_monomial(const Monomial& m) const
    {
        for (std::size_t i = nvars_ + 1; i < Monomial::kSlots; ++i)
            if (m[i] != 0) throw DimensionMismatch("monomial uses a variable beyond nvars");
    }

    template <class F>
    std::uint32_t max_over(F&& f) const
    {
        std::uint32_t d = 0;
        for (const auto& t : terms_) d = std::max(d, f(t.mono));
        return d;
    }

    static Polynomial merge(const Polynomial& a, const Polynomial& b, bool subtract)
    {
        if (a.nvars_ != b.nvars_) throw DimensionMismatch("polynomials have different variable counts");
        Polynomial r(a.nvars_);
        r.terms_.reserve(a.terms_.size() + b.terms_.size());
        auto i = a.terms_.begin(), j = b.terms_.begin();
        while (i != a.terms_.end() || j != b.terms_.end()) {
            if (j == b.terms_.end() || (i != a.terms_.end() && i->mono < j->mono)) {
                r.terms_.push_back(*i++);
            } else if (i == a.terms_.end() || j->mono < i->mono) {
                r.terms_.push_back({j->mono, subtract ? Rational(-j->coeff) : j->coeff});
                ++j;
            } else {
                Rational c = subtract ? Rational(i->coeff - j->coeff) : Rational(i->coeff + j->coeff);
                if (c != 0) r.terms_.push_back({i->mono, std::move(c)});
                ++i;
                ++j;
            }
        }
        return r;
    }

    std::size_t nvars_ = 0;
    std::vector<Term> terms_;
};

/// Hash-map accumulator for sums of many polynomials; finish() sorts once.
class PolynomialAccumulator {
public:
    explicit PolynomialAccumulator(std::size_t nvars) : nvars_(nvars) {}

    void add(const Monomial& m, const Rational& c) { acc_[m] += c; }

    void add_scaled(const Polynomial& p, const Rational& c)
    {
        if (p.nvars() != nvars_) throw DimensionMismatch("accumulator variable count mismatch");
        for (const auto& t : p.terms()) acc_[t.mono] += t.coeff * c;
    }

    void add_scaled_shifted(const Polynomial& p, const Rational& c, const Monomial& shift)
    {
        if (p.nvars() != nvars_) throw DimensionMismatch("accumulator variable count mismatch");
        for (const auto& t : p.terms()) acc_[t.mono * shift] += t.coeff * c;
    }

    std::size_t size() const { return acc_.size(); }

    Polynomial finish()
    {
        Polynomial p(nvars_);
        p.terms_.reserve(acc_.size());
        for (auto& [m, c] : acc_)
            if (c != 0) p.terms_.push_back({m, std::move(c)});
        acc_.clear();
        std::sort(p.terms_.begin(), p.terms_.end(), [](const Term& a, const Term& b) { return a.mono < b.mono; });
        return p;
    }

private:
    std::size_t nvars_;
    std::unordered_map<Monomial, Rational, MonomialHash> acc_;
};

namespace detail {

struct IntegerForm {
    BigInt denominator;
    std::vector<std::pair<Monomial, BigInt>> terms;
};

// p = (1/denominator) * sum(terms); denominator is the lcm of coefficient denominators.
inline IntegerForm integer_form(const Polynomial& p)
{
    IntegerForm f{BigInt(1), {}};
    for (const auto& t : p.terms()) mpz_lcm(f.denominator.get_mpz_t(), f.denominator.get_mpz_t(), t.coeff.get_den_mpz_t());
    f.terms.reserve(p.size());
    for (const auto& t : p.terms()) {
        BigInt scaled = f.denominator / t.coeff.get_den();
        scaled *= t.coeff.get_num();
        f.terms.emplace_back(t.mono, std::move(scaled));
    }
    return f;
}

}  // namespace detail

inline Polynomial operator*(const Polynomial& a, const Polynomial& b)
{
    if (a.nvars() != b.nvars()) throw DimensionMismatch("polynomials have different variable counts");
    if (a.is_zero() || b.is_zero()) return Polynomial(a.nvars());
    // Integer products avoid a gcd per multiply-add; one division at the end.
    const auto fa = detail::integer_form(a);
    const auto fb = detail::integer_form(b);
    std::unordered_map<Monomial, BigInt, MonomialHash> acc;
    acc.reserve(std::min<std::size_t>(a.size() * b.size(), 1u << 22));
    for (const auto& [ma, ca] : fa.terms)
        for (const auto& [mb, cb] : fb.terms) mpz_addmul(acc[ma * mb].get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
    const BigInt denominator = fa.denominator * fb.denominator;
    std::vector<Term> terms;
    terms.reserve(acc.size());
    for (auto& [m, c] : acc) {
        if (c == 0) continue;
        Rational q(c, denominator);
        q.canonicalize();
        terms.push_back({m, std::move(q)});
    }
    return Polynomial::from_terms(a.nvars(), std::move(terms));
}

inline Polynomial pow(const Polynomial& p, std::uint32_t exponent)
{
    Polynomial result = Polynomial::constant(p.nvars(), 1);
    Polynomial base = p;
    while (exponent > 0) {
        if (exponent & 1u) result = result * base;
        exponent >>= 1;
        if (exponent > 0) base = base * base;
    }
    return result;
}

/// Partial derivative with respect to slot (0 = t, i = x_i).
inline Polynomial differentiate(const Polynomial& p, std::size_t slot)
{
    if (slot > p.nvars()) throw std::out_of_range("differentiation index out of range");
    std::vector<Term> terms;
    for (const auto& t : p.terms()) {
        const auto e = t.mono[slot];
        if (e == 0) continue;
        Monomial m = t.mono;
        m.set(slot, e - 1);
        terms.push_back({m, t.coeff * e});
    }
    return Polynomial::from_terms(p.nvars(), std::move(terms));
}

/// Antiderivative in t with zero constant of integration.
inline Polynomial indefinite_integrate_t(const Polynomial& p)
{
    std::vector<Term> terms;
    terms.reserve(p.size());
    for (const auto& t : p.terms()) {
        Monomial m = t.mono;
        const auto e = m.t_degree() + 1;
        m.set(0, e);
        Rational c = t.coeff / e;
        terms.push_back({m, std::move(c)});
    }
    return Polynomial::from_terms(p.nvars(), std::move(terms));
}

/// Definite integral over t in [lo, hi]; the result is free of t.
inline Polynomial integrate_t(const Polynomial& p, const Rational& lo, const Rational& hi)
{
    if (hi < lo) throw std::invalid_argument("integration bounds must satisfy lo <= hi");
    PolynomialAccumulator acc(p.nvars());
    std::vector<Rational> moments;  // (hi^(e+1) - lo^(e+1)) / (e+1)
    for (const auto& t : p.terms()) {
        const auto e = t.mono.t_degree();
        while (moments.size() <= e) {
            const auto k = static_cast<unsigned long>(moments.size() + 1);
            moments.push_back((pow(hi, k) - pow(lo, k)) / k);
        }
        acc.add(t.mono.x_part(), t.coeff * moments[e]);
    }
    return acc.finish();
}

/// Substitutes t = value; the result is free of t.
inline Polynomial evaluate_t(const Polynomial& p, const Rational& value)
{
    PolynomialAccumulator acc(p.nvars());
    std::vector<Rational> powers{Rational(1)};
    for (const auto& t : p.terms()) {
        const auto e = t.mono.t_degree();
        while (powers.size() <= e) powers.push_back(powers.back() * value);
        acc.add(t.mono.x_part(), t.coeff * powers[e]);
    }
    return acc.finish();
}

/**
 * Substitution x_i -> x_subst[i-1] (and t -> t_subst when given; otherwise t
 * is left alone). All substitutes share one variable count, which becomes the
 * variable count of every result. Powers of the substitutes are cached, so
 * applying one substitution to several polynomials shares that work.
 */
class Substitution {
public:
    Substitution(std::vector<Polynomial> x_subst, std::optional<Polynomial> t_subst = std::nullopt)
        : x_(std::move(x_subst)), t_(std::move(t_subst)), powers_(x_.size() + 1)
    {
        out_vars_ = t_ ? t_->nvars() : (x_.empty() ? 0 : x_[0].nvars());
        for (const auto& s : x_)
            if (s.nvars() != out_vars_) throw DimensionMismatch("substitutes have different variable counts");
    }

    std::size_t output_nvars() const { return out_vars_; }

    Polynomial apply(const Polynomial& p)
    {
        if (x_.size() != p.nvars()) throw DimensionMismatch("substitution needs one entry per state variable");
        if (!t_ && x_.empty()) return p;
        const std::size_t nslots = p.nvars() + 1;

        // Group terms by the part that needs substituting so each distinct
        // product is expanded once. Without a t substitute the t power rides
        // along as a monomial shift.
        std::vector<std::pair<Monomial, std::vector<const Term*>>> groups;
        {
            std::unordered_map<Monomial, std::size_t, MonomialHash> index;
            for (const auto& t : p.terms()) {
                Monomial key = t_ ? t.mono : t.mono.x_part();
                auto [it, inserted] = index.try_emplace(key, groups.size());
                if (inserted) groups.push_back({key, {}});
                groups[it->second].second.push_back(&t);
            }
        }

        PolynomialAccumulator acc(out_vars_);
        for (const auto& [key, members] : groups) {
            Polynomial product = Polynomial::constant(out_vars_, 1);
            for (std::size_t slot = t_ ? 0 : 1; slot < nslots; ++slot)
                if (key[slot] > 0) product = product * power(slot, key[slot]);
            for (const Term* t : members) {
                if (t_)
                    acc.add_scaled(product, t->coeff);
                else
                    acc.add_scaled_shifted(product, t->coeff, Monomial::unit(0, t->mono.t_degree()));
            }
        }
        return acc.finish();
    }

private:
    const Polynomial& power(std::size_t slot, std::uint32_t e)
    {
        auto& cache = powers_[slot];
        const Polynomial& base = slot == 0 ? *t_ : x_[slot - 1];
        if (cache.empty()) cache.push_back(Polynomial::constant(out_vars_, 1));
        while (cache.size() <= e) cache.push_back(cache.back() * base);
        return cache[e];
    }

    std::vector<Polynomial> x_;
    std::optional<Polynomial> t_;
    std::size_t out_vars_ = 0;
    std::vector<std::vector<Polynomial>> powers_;
};

inline Polynomial compose(const Polynomial& p, std::span<const Polynomial> x_subst,
                          const std::optional<Polynomial>& t_subst = std::nullopt)
{
    Substitution s(std::vector<Polynomial>(x_subst.begin(), x_subst.end()), t_subst);
    return s.apply(p);
}

inline Polynomial compose(const Polynomial& p, std::initializer_list<Polynomial> x_subst)
{
    std::vector<Polynomial> v(x_subst);
    return compose(p, std::span<const Polynomial>(v));
}

/**
 * Direct sum of term values. The point holds x1..xn, optionally preceded by t
 * (length n+1). A length-n point is only accepted for polynomials free of t.
 */
template <class Scalar>
Scalar coefficient_as(const Rational& c)
{
    if constexpr (std::is_same_v<Scalar, Rational>)
        return c;
    else
        return static_cast<Scalar>(c.get_d());
}

template <class Scalar>
Scalar evaluate(const Polynomial& p, std::span<const Scalar> point)
{
    const std::size_t n = p.nvars();
    std::size_t offset;
    if (point.size() == n + 1) {
        offset = 0;
    } else if (point.size() == n) {
        if (p.has_t()) throw DimensionMismatch("point omits t but the polynomial depends on t");
        offset = 1;
    } else {
        throw DimensionMismatch("evaluation point has the wrong length");
    }
    auto coordinate = [&](std::size_t slot) -> const Scalar& { return point[slot - offset]; };

    std::vector<std::vector<Scalar>> powers(n + 1);
    Scalar sum(0);
    for (const auto& t : p.terms()) {
        Scalar value = coefficient_as<Scalar>(t.coeff);
        for (std::size_t slot = offset; slot <= n; ++slot) {
            const auto e = t.mono[slot];
            if (e == 0) continue;
            auto& cache = powers[slot];
            if (cache.empty()) cache.push_back(Scalar(1));
            while (cache.size() <= e) cache.push_back(cache.back() * coordinate(slot));
            value *= cache[e];
        }
        sum += value;
    }
    return sum;
}

template <class Scalar>
Scalar evaluate(const Polynomial& p, std::initializer_list<Scalar> point)
{
    std::vector<Scalar> v(point);
    return evaluate<Scalar>(p, std::span<const Scalar>(v));
}

/// Double-precision evaluator with coefficients converted once up front.
class CompiledPolynomial {
public:
    CompiledPolynomial() = default;
    explicit CompiledPolynomial(const Polynomial& p) : nvars_(p.nvars())
    {
        for (const auto& t : p.terms()) {
            Entry e;
            e.coeff = t.coeff.get_d();
            for (std::size_t slot = 0; slot <= nvars_; ++slot) {
                if (t.mono[slot] == 0) continue;
                e.factors.emplace_back(static_cast<std::uint8_t>(slot), t.mono[slot]);
                max_power_ = std::max(max_power_, t.mono[slot]);
            }
            entries_.push_back(std::move(e));
        }
    }

    std::size_t nvars() const { return nvars_; }

    /// t first, then x.
    double operator()(double t, std::span<const double> x) const
    {
        double sum = 0.0;
        for (const auto& e : entries_) {
            double v = e.coeff;
            for (const auto& [slot, power] : e.factors) v *= ipow(slot == 0 ? t : x[slot - 1], power);
            sum += v;
        }
        return sum;
    }

    double operator()(std::span<const double> x) const { return (*this)(0.0, x); }

private:
    static double ipow(double base, std::uint32_t e)
    {
        double r = 1.0;
        while (e) {
            if (e & 1u) r *= base;
            e >>= 1;
            if (e) base *= base;
        }
        return r;
    }

    struct Entry {
        double coeff = 0.0;
        std::vector<std::pair<std::uint8_t, std::uint32_t>> factors;
    };
    std::size_t nvars_ = 0;
    std::uint32_t max_power_ = 0;
    std::vector<Entry> entries_;
};

inline std::string variable_name(std::size_t slot) { return slot == 0 ? "t" : "x" + std::to_string(slot); }

/// Human-readable form, highest graded-lex term first: "x1^2*x2 - 3/2*t + 1".
inline std::string to_string(const Polynomial& p)
{
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        Rational c = it->coeff;
        const bool negative = c < 0;
        if (negative) c = -c;
        if (first)
            os << (negative ? "-" : "");
        else
            os << (negative ? " - " : " + ");
        first = false;
        std::string factors;
        for (std::size_t slot = 1; slot <= p.nvars() + 1; ++slot) {
            const std::size_t s = slot % (p.nvars() + 1);  // x1..xn then t
            const auto e = it->mono[s];
            if (e == 0) continue;
            if (!factors.empty()) factors += "*";
            factors += variable_name(s);
            if (e > 1) factors += "^" + std::to_string(e);
        }
        if (factors.empty())
            os << c.get_str();
        else if (c == 1)
            os << factors;
        else
            os << c.get_str() << "*" << factors;
    }
    return os.str();
}

inline Polynomial dot(std::span<const Polynomial> a, std::span<const Polynomial> b)
{
    if (a.size() != b.size() || a.empty()) throw DimensionMismatch("dot product needs equal nonempty vectors");
    Polynomial sum(a[0].nvars());
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

}  // namespace convlyap
