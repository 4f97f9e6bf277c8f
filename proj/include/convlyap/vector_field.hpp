/**
 * @file vector_field.hpp
 * @brief Polynomial vector fields f with f(0) = 0 and their text format.
 *
 * Text format, one statement per line or separated by ';':
 *
 *     x1' = -x2
 *     x2' = -(1 - x1^2)*x2 + x1    # comments run to end of line
 *
 * Expressions use + - * ^ (nonnegative integer powers), parentheses, and
 * integer, decimal (2.1), or rational (3/4) literals. Decimal literals are
 * read as exact rationals.
 */
#pragma once

#include "convlyap/polynomial.hpp"

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace convlyap {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line), column_(column)
    {
    }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_, column_;
};

struct InvalidVectorField : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

class VectorField {
public:
    VectorField() = default;

    explicit VectorField(std::vector<Polynomial> components) : components_(std::move(components))
    {
        const std::size_t n = components_.size();
        if (n == 0) throw InvalidVectorField("vector field needs at least one component");
        for (std::size_t i = 0; i < n; ++i) {
            const auto& c = components_[i];
            if (c.nvars() != n)
                throw InvalidVectorField("component " + std::to_string(i + 1) + " has " + std::to_string(c.nvars()) +
                                         " variables, expected " + std::to_string(n));
            if (c.has_t()) throw InvalidVectorField("component " + std::to_string(i + 1) + " depends on t");
            if (c.coefficient(Monomial{}) != 0)
                throw InvalidVectorField("component " + std::to_string(i + 1) +
                                         " has a nonzero constant term, so f(0) != 0");
            q_ = std::max(q_, c.degree());
        }
    }

    std::size_t n() const { return components_.size(); }
    /// Max component degree; 0 only for the identically zero field.
    std::uint32_t q() const { return q_; }
    const std::vector<Polynomial>& components() const { return components_; }
    const Polynomial& operator[](std::size_t i) const { return components_[i]; }

    bool operator==(const VectorField&) const = default;

private:
    std::vector<Polynomial> components_;
    std::uint32_t q_ = 0;
};

namespace detail {

enum class Tok { Number, Variable, Time, Plus, Minus, Star, Slash, Caret, LParen, RParen, Prime, Equals, Separator, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t line, column;
};

inline std::vector<Token> tokenize(std::string_view src)
{
    std::vector<Token> out;
    std::size_t line = 1, col = 1, depth = 0;
    std::size_t i = 0;
    auto push = [&](Tok k, std::string text, std::size_t l, std::size_t c) { out.push_back({k, std::move(text), l, c}); };
    while (i < src.size()) {
        const char ch = src[i];
        const std::size_t l = line, c = col;
        auto advance = [&](std::size_t count = 1) {
            for (std::size_t j = 0; j < count; ++j) {
                if (src[i] == '\n') {
                    ++line;
                    col = 1;
                } else {
                    ++col;
                }
                ++i;
            }
        };
        if (ch == '#') {
            while (i < src.size() && src[i] != '\n') advance();
        } else if (ch == '\n') {
            if (depth == 0) push(Tok::Separator, "\\n", l, c);
            advance();
        } else if (std::isspace(static_cast<unsigned char>(ch))) {
            advance();
        } else if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
            std::size_t j = i;
            while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
                    j = k;
                }
            }
            push(Tok::Number, std::string(src.substr(i, j - i)), l, c);
            advance(j - i);
        } else if (ch == 't') {
            push(Tok::Time, "t", l, c);
            advance();
        } else if (ch == 'x') {
            std::size_t j = i + 1;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j == i + 1) throw ParseError("expected variable index after 'x'", l, c);
            push(Tok::Variable, std::string(src.substr(i + 1, j - i - 1)), l, c);
            advance(j - i);
        } else {
            Tok k;
            switch (ch) {
            case '+': k = Tok::Plus; break;
            case '-': k = Tok::Minus; break;
            case '*': k = Tok::Star; break;
            case '/': k = Tok::Slash; break;
            case '^': k = Tok::Caret; break;
            case '(': k = Tok::LParen; ++depth; break;
            case ')':
                k = Tok::RParen;
                if (depth > 0) --depth;
                break;
            case '\'': k = Tok::Prime; break;
            case '=': k = Tok::Equals; break;
            case ';': k = Tok::Separator; break;
            default: throw ParseError(std::string("unexpected character '") + ch + "'", l, c);
            }
            push(k, std::string(1, ch), l, c);
            advance();
        }
    }
    push(Tok::End, "", line, col);
    return out;
}

class ExpressionParser {
public:
    ExpressionParser(const std::vector<Token>& tokens, std::size_t nvars, bool allow_t = false)
        : toks_(tokens), nvars_(nvars), allow_t_(allow_t)
    {
    }

    std::size_t pos = 0;

    const Token& peek() const { return toks_[pos]; }
    const Token& take() { return toks_[pos++]; }

    [[noreturn]] void fail(const std::string& what, const Token& at) const { throw ParseError(what, at.line, at.column); }

    void expect(Tok kind, const char* what)
    {
        if (peek().kind != kind) fail(std::string("expected ") + what, peek());
        ++pos;
    }

    Polynomial expression()
    {
        Polynomial acc = term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            const bool minus = take().kind == Tok::Minus;
            Polynomial rhs = term();
            acc = minus ? acc - rhs : acc + rhs;
        }
        return acc;
    }

private:
    Polynomial term()
    {
        Polynomial acc = factor();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            const Token& op = take();
            const Token& at = peek();
            Polynomial rhs = factor();
            if (op.kind == Tok::Star) {
                acc = acc * rhs;
            } else {
                if (rhs.degree() != 0 || rhs.is_zero()) fail("division is only allowed by a nonzero constant", at);
                acc *= Rational(1) / rhs.coefficient(Monomial{});
            }
        }
        return acc;
    }

    Polynomial factor()
    {
        if (peek().kind == Tok::Minus) {
            ++pos;
            return -factor();
        }
        if (peek().kind == Tok::Plus) {
            ++pos;
            return factor();
        }
        Polynomial base = primary();
        if (peek().kind == Tok::Caret) {
            ++pos;
            const Token& e = peek();
            if (e.kind != Tok::Number || e.text.find_first_not_of("0123456789") != std::string::npos)
                fail("exponent must be a nonnegative integer literal", e);
            ++pos;
            base = pow(base, static_cast<std::uint32_t>(std::stoul(e.text)));
        }
        return base;
    }

    Polynomial primary()
    {
        const Token& tok = peek();
        switch (tok.kind) {
        case Tok::Number: {
            ++pos;
            try {
                return Polynomial::constant(nvars_, parse_rational(tok.text));
            } catch (const std::invalid_argument& e) {
                fail(e.what(), tok);
            }
        }
        case Tok::Variable: {
            ++pos;
            const std::size_t index = std::stoul(tok.text);
            if (index == 0 || index > nvars_)
                fail("variable x" + tok.text + " is outside x1..x" + std::to_string(nvars_), tok);
            return Polynomial::variable(nvars_, index);
        }
        case Tok::Time:
            if (!allow_t_) fail("t is not allowed here", tok);
            ++pos;
            return Polynomial::variable(nvars_, 0);
        case Tok::LParen: {
            ++pos;
            Polynomial inner = expression();
            expect(Tok::RParen, "')'");
            return inner;
        }
        default: fail("expected a number, variable, or '('", tok);
        }
    }

    const std::vector<Token>& toks_;
    std::size_t nvars_;
    bool allow_t_;
};

}  // namespace detail

/// Parses a single polynomial in x1..x{nvars}, and in t unless allow_t is false.
inline Polynomial parse_polynomial(std::string_view text, std::size_t nvars, bool allow_t = true)
{
    auto tokens = detail::tokenize(text);
    detail::ExpressionParser parser(tokens, nvars, allow_t);
    while (parser.peek().kind == detail::Tok::Separator) ++parser.pos;
    Polynomial p = parser.expression();
    while (parser.peek().kind == detail::Tok::Separator) ++parser.pos;
    if (parser.peek().kind != detail::Tok::End) parser.fail("unexpected trailing input", parser.peek());
    return p;
}

/// Parses a system of statements x<i>' = <expr>; see the file comment.
inline VectorField parse_system(std::string_view text)
{
    auto tokens = detail::tokenize(text);
    // First pass: the state dimension is the number of statements.
    std::size_t n = 0;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
        if (tokens[i].kind == detail::Tok::Variable && tokens[i + 1].kind == detail::Tok::Prime) ++n;
    if (n == 0) throw ParseError("no statements of the form x<i>' = ...", 1, 1);
    if (n > kMaxVariables) throw ParseError("too many state variables", 1, 1);

    detail::ExpressionParser parser(tokens, n);
    std::map<std::size_t, Polynomial> rows;
    while (parser.peek().kind != detail::Tok::End) {
        if (parser.peek().kind == detail::Tok::Separator) {
            ++parser.pos;
            continue;
        }
        const auto& lhs = parser.peek();
        if (lhs.kind != detail::Tok::Variable) parser.fail("statement must start with x<i>'", lhs);
        ++parser.pos;
        const std::size_t index = std::stoul(lhs.text);
        if (index == 0 || index > n)
            parser.fail("state index " + lhs.text + " outside 1.." + std::to_string(n), lhs);
        if (rows.count(index)) parser.fail("x" + lhs.text + "' defined twice", lhs);
        parser.expect(detail::Tok::Prime, "\"'\" after state variable");
        parser.expect(detail::Tok::Equals, "'='");
        const auto& rhs_start = parser.peek();
        Polynomial rhs = parser.expression();
        if (rhs.coefficient(Monomial{}) != 0)
            parser.fail("right-hand side of x" + lhs.text + "' has a nonzero constant term (f(0) != 0)", rhs_start);
        rows.emplace(index, std::move(rhs));
        const auto kind = parser.peek().kind;
        if (kind != detail::Tok::Separator && kind != detail::Tok::End)
            parser.fail("expected ';' or newline after statement", parser.peek());
    }
    std::vector<Polynomial> components;
    for (std::size_t i = 1; i <= n; ++i) {
        auto it = rows.find(i);
        if (it == rows.end()) throw ParseError("missing statement for x" + std::to_string(i) + "'", 1, 1);
        components.push_back(std::move(it->second));
    }
    return VectorField(std::move(components));
}

inline std::string to_string(const VectorField& f)
{
    std::string s;
    for (std::size_t i = 0; i < f.n(); ++i) s += "x" + std::to_string(i + 1) + "' = " + to_string(f[i]) + "\n";
    return s;
}

}  // namespace convlyap
