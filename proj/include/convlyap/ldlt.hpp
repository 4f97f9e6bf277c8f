/**
 * @file ldlt.hpp
 * @brief Exact rational LDL^T with symmetric pivoting, used to certify that
 *        Gram blocks are positive semidefinite without any tolerance.
 */
#pragma once

#include "convlyap/rational.hpp"

#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

namespace convlyap {

/// Dense square matrix of rationals, row-major.
class RationalMatrix {
public:
    RationalMatrix() = default;
    explicit RationalMatrix(std::size_t n) : n_(n), data_(n * n) {}

    static RationalMatrix identity(std::size_t n)
    {
        RationalMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t size() const { return n_; }
    Rational& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    bool is_symmetric() const
    {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                if ((*this)(i, j) != (*this)(j, i)) return false;
        return true;
    }

    /// Kronecker product this (x) I_m.
    RationalMatrix kron_identity(std::size_t m) const
    {
        RationalMatrix out(n_ * m);
        for (std::size_t a = 0; a < n_; ++a)
            for (std::size_t b = 0; b < n_; ++b)
                for (std::size_t i = 0; i < m; ++i) out(a * m + i, b * m + i) = (*this)(a, b);
        return out;
    }

    RationalMatrix operator*(const Rational& c) const
    {
        RationalMatrix out = *this;
        for (auto& v : out.data_) v *= c;
        return out;
    }

    bool operator==(const RationalMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<Rational> data_;
};

struct PsdResult {
    bool psd = false;
    /// Original index of the row where PSD-ness failed.
    std::optional<std::size_t> failing_index;
    /// Pivots in elimination order (all >= 0 when psd).
    std::vector<Rational> pivots;
    std::vector<std::size_t> permutation;
};

/**
 * P A P^T = L D L^T with the largest remaining diagonal as pivot. A is PSD
 * iff every pivot is >= 0 and, once the largest remaining diagonal is zero,
 * the whole remaining block is zero.
 */
inline PsdResult psd_check(const RationalMatrix& input)
{
    if (!input.is_symmetric()) throw std::invalid_argument("psd_check needs a symmetric matrix");
    const std::size_t n = input.size();
    RationalMatrix a = input;
    PsdResult res;
    res.permutation.resize(n);
    std::iota(res.permutation.begin(), res.permutation.end(), std::size_t{0});

    auto swap_sym = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t c = 0; c < n; ++c) std::swap(a(i, c), a(j, c));
        for (std::size_t r = 0; r < n; ++r) std::swap(a(r, i), a(r, j));
        std::swap(res.permutation[i], res.permutation[j]);
    };

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (a(i, i) > a(p, p)) p = i;
        swap_sym(k, p);
        const Rational pivot = a(k, k);
        res.pivots.push_back(pivot);
        if (pivot < 0) {
            res.failing_index = res.permutation[k];
            return res;
        }
        if (pivot == 0) {
            // Every remaining diagonal is <= 0 here; PSD forces the block to vanish.
            for (std::size_t i = k; i < n; ++i)
                for (std::size_t j = k; j < n; ++j)
                    if (a(i, j) != 0) {
                        res.failing_index = res.permutation[i];
                        return res;
                    }
            for (std::size_t i = k + 1; i < n; ++i) res.pivots.push_back(0);
            res.psd = true;
            return res;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a(i, k) == 0) continue;
            const Rational l = a(i, k) / pivot;
            for (std::size_t j = k + 1; j <= i; ++j) {
                a(i, j) -= l * a(j, k);
                if (j != i) a(j, i) = a(i, j);
            }
        }
        for (std::size_t i = k + 1; i < n; ++i) a(i, k) = a(k, i) = 0;
    }
    res.psd = true;
    return res;
}

}  // namespace convlyap
