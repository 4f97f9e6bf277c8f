/**
 * @file dynamics.hpp
 * @brief Fixed-step RK4 oracle for the flow of a polynomial field, and
 *        sampling estimators for the stability data K, lambda and L.
 */
#pragma once

#include "convlyap/vector_field.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace convlyap {

using State = std::vector<double>;

/// Shortest decimal text that reads back as the same double.
inline std::string shortest(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double norm2(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

/// f with double coefficients, for the numeric oracle.
class CompiledField {
public:
    explicit CompiledField(const VectorField& f)
    {
        for (const auto& c : f.components()) comps_.emplace_back(c);
    }
    std::size_t n() const { return comps_.size(); }
    State operator()(std::span<const double> x) const
    {
        State out(comps_.size());
        for (std::size_t i = 0; i < comps_.size(); ++i) out[i] = comps_[i](x);
        return out;
    }

private:
    std::vector<CompiledPolynomial> comps_;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    bool diverged = false;

    const State& final_state() const { return states.back(); }

    void write_csv(std::ostream& os) const
    {
        const std::size_t n = states.empty() ? 0 : states.front().size();
        os << "t";
        for (std::size_t i = 1; i <= n; ++i) os << ",x" << i;
        os << "\n";
        for (std::size_t r = 0; r < times.size(); ++r) {
            os << shortest(times[r]);
            for (double v : states[r]) os << "," << shortest(v);
            os << "\n";
        }
    }
};

inline constexpr double kBlowup = 1e6;

inline State rk4_step(const CompiledField& f, const State& x, double h)
{
    const std::size_t n = x.size();
    auto axpy = [&](const State& base, const State& d, double s) {
        State out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = base[i] + s * d[i];
        return out;
    };
    const State k1 = f(x);
    const State k2 = f(axpy(x, k1, h / 2));
    const State k3 = f(axpy(x, k2, h / 2));
    const State k4 = f(axpy(x, k3, h));
    State out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return out;
}

/// Fixed-step RK4 from t = 0 to t_end in round(t_end / h) steps of size h.
inline Trajectory simulate(const CompiledField& f, std::span<const double> x0, double t_end, double h,
                           double blowup = kBlowup)
{
    if (!(h > 0.0) || !(t_end > 0.0)) throw std::invalid_argument("simulate needs h > 0 and t_end > 0");
    if (x0.size() != f.n()) throw DimensionMismatch("initial state dimension does not match the field");
    const auto steps = static_cast<std::size_t>(std::llround(t_end / h));
    Trajectory tr;
    tr.times.reserve(steps + 1);
    tr.states.reserve(steps + 1);
    tr.times.push_back(0.0);
    tr.states.emplace_back(x0.begin(), x0.end());
    for (std::size_t s = 1; s <= steps; ++s) {
        State next = rk4_step(f, tr.states.back(), h);
        const double nrm = norm2(next);
        if (!std::isfinite(nrm) || nrm > blowup) {
            tr.diverged = true;
            break;
        }
        tr.times.push_back(double(s) * h);
        tr.states.push_back(std::move(next));
    }
    return tr;
}

inline Trajectory simulate(const VectorField& f, std::span<const double> x0, double t_end, double h,
                           double blowup = kBlowup)
{
    return simulate(CompiledField(f), x0, t_end, h, blowup);
}

/// Radical inverse of i in the given prime base (Halton coordinate).
inline double radical_inverse(std::size_t i, unsigned base)
{
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (i > 0) {
        r += f * double(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

inline constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

/**
 * Deterministic points on the sphere of radius r: +-r for n = 1, angles
 * 2 pi (j + 1/2) / count for n = 2, and normalized Halton points otherwise.
 */
inline std::vector<State> sphere_points(std::size_t n, double r, std::size_t count)
{
    std::vector<State> out;
    if (n == 1) {
        for (std::size_t j = 0; j < count; ++j) out.push_back({j % 2 == 0 ? r : -r});
        return out;
    }
    if (n == 2) {
        for (std::size_t j = 0; j < count; ++j) {
            const double th = 2 * std::numbers::pi * (double(j) + 0.5) / double(count);
            out.push_back({r * std::cos(th), r * std::sin(th)});
        }
        return out;
    }
    for (std::size_t i = 1; out.size() < count; ++i) {
        State z(n);
        for (std::size_t d = 0; d < n; ++d) z[d] = 2 * radical_inverse(i, kPrimes[d]) - 1;
        const double nrm = norm2(z);
        if (nrm < 1e-9) continue;
        for (double& v : z) v *= r / nrm;
        out.push_back(std::move(z));
    }
    return out;
}

struct EstimateReport {
    double K_hat = 1.0;
    double lambda_hat = 0.0;
    double L_hat = 0.0;
    double r = 0.0;
    std::size_t samples = 0;
    /// RMS residual of the log-norm fits, averaged over samples.
    double fit_residual = 0.0;
    double lambda_min = 0.0;  ///< smallest per-sample decay rate
    double lambda_max = 0.0;  ///< largest per-sample decay rate
    std::optional<State> unstable_start;  ///< first initial state whose trajectory blew up

    bool stable() const { return !unstable_start.has_value() && lambda_hat > 0.0; }
};

struct EstimateOptions {
    std::size_t samples = 32;
    double t_end = 20.0;
    double h = 1e-3;
    double tail_fraction = 0.5;  ///< fit window is [t_end (1 - tail_fraction), t_end]
    std::size_t grid_per_dim = 101;
};

namespace detail {

struct LineFit {
    double slope = 0.0;
    double rms = 0.0;
};

inline LineFit least_squares(const std::vector<double>& t, const std::vector<double>& y)
{
    const double m = double(t.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        st += t[i];
        sy += y[i];
        stt += t[i] * t[i];
        sty += t[i] * y[i];
    }
    const double den = m * stt - st * st;
    LineFit fit;
    if (den == 0.0) return fit;
    fit.slope = (m * sty - st * sy) / den;
    const double icpt = (sy - fit.slope * st) / m;
    double ss = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double e = y[i] - (icpt + fit.slope * t[i]);
        ss += e * e;
    }
    fit.rms = std::sqrt(ss / m);
    return fit;
}

}  // namespace detail

/**
 * lambda_hat is minus the mean least-squares slope of log|x(t)| over the tail
 * window; K_hat is the max of |x(t)| e^{lambda_hat t} / |x0|, floored at 1.
 */
inline EstimateReport estimate_K_lambda(const VectorField& f, double r, const EstimateOptions& opt = {})
{
    if (!(r > 0.0)) throw std::invalid_argument("radius must be positive");
    if (opt.samples == 0) throw std::invalid_argument("need at least one sample");
    if (!(opt.tail_fraction > 0.0 && opt.tail_fraction <= 1.0)) throw std::invalid_argument("tail fraction must be in (0, 1]");
    const CompiledField cf(f);
    EstimateReport rep;
    rep.r = r;
    rep.samples = opt.samples;
    const double t0 = opt.t_end * (1.0 - opt.tail_fraction);

    std::vector<Trajectory> runs;
    double slope_sum = 0, rms_sum = 0;
    rep.lambda_min = std::numeric_limits<double>::infinity();
    rep.lambda_max = -std::numeric_limits<double>::infinity();
    for (const auto& x0 : sphere_points(f.n(), r, opt.samples)) {
        Trajectory tr = simulate(cf, x0, opt.t_end, opt.h);
        if (tr.diverged) {
            rep.unstable_start = x0;
            return rep;
        }
        std::vector<double> ts, ys;
        for (std::size_t i = 0; i < tr.times.size(); ++i) {
            if (tr.times[i] < t0) continue;
            const double nrm = norm2(tr.states[i]);
            if (nrm < 1e-300) break;
            ts.push_back(tr.times[i]);
            ys.push_back(std::log(nrm));
        }
        const auto fit = detail::least_squares(ts, ys);
        slope_sum += fit.slope;
        rms_sum += fit.rms;
        rep.lambda_min = std::min(rep.lambda_min, -fit.slope);
        rep.lambda_max = std::max(rep.lambda_max, -fit.slope);
        runs.push_back(std::move(tr));
    }
    rep.lambda_hat = -slope_sum / double(opt.samples);
    rep.fit_residual = rms_sum / double(opt.samples);

    double K = 1.0;
    for (const auto& tr : runs) {
        const double n0 = norm2(tr.states.front());
        for (std::size_t i = 0; i < tr.times.size(); ++i)
            K = std::max(K, norm2(tr.states[i]) * std::exp(rep.lambda_hat * tr.times[i]) / n0);
    }
    rep.K_hat = K;
    return rep;
}

/// Points of the uniform grid on [-radius, radius]^n (endpoints included) that lie in the closed ball.
template <class Visit>
void for_each_ball_grid_point(std::size_t n, double radius, std::size_t grid_per_dim, Visit&& visit)
{
    if (grid_per_dim == 0) throw std::invalid_argument("grid needs at least one point per dimension");
    std::vector<std::size_t> idx(n, 0);
    State x(n);
    const double r2 = radius * radius * (1 + 1e-12);
    auto coord = [&](std::size_t i) {
        return grid_per_dim == 1 ? 0.0 : -radius + 2 * radius * double(i) / double(grid_per_dim - 1);
    };
    while (true) {
        double s = 0;
        for (std::size_t d = 0; d < n; ++d) {
            x[d] = coord(idx[d]);
            s += x[d] * x[d];
        }
        if (s <= r2) visit(std::span<const double>(x));
        std::size_t d = 0;
        while (d < n && ++idx[d] == grid_per_dim) idx[d++] = 0;
        if (d == n) break;
    }
}

/// Symbolic Jacobian of f, compiled for double evaluation.
class CompiledJacobian {
public:
    explicit CompiledJacobian(const VectorField& f) : n_(f.n())
    {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) entries_.emplace_back(differentiate(f[i], j + 1));
    }

    /// Max singular value by 200 power iterations on J^T J from the normalized all-ones vector.
    double sigma_max(std::span<const double> x, int iterations = 200) const
    {
        std::vector<double> J(n_ * n_);
        for (std::size_t e = 0; e < J.size(); ++e) J[e] = entries_[e](x);
        std::vector<double> v(n_, 1.0 / std::sqrt(double(n_))), Jv(n_), w(n_);
        double rayleigh = 0.0;
        for (int it = 0; it < iterations; ++it) {
            for (std::size_t i = 0; i < n_; ++i) {
                Jv[i] = 0;
                for (std::size_t j = 0; j < n_; ++j) Jv[i] += J[i * n_ + j] * v[j];
            }
            for (std::size_t j = 0; j < n_; ++j) {
                w[j] = 0;
                for (std::size_t i = 0; i < n_; ++i) w[j] += J[i * n_ + j] * Jv[i];
            }
            rayleigh = 0;
            for (std::size_t i = 0; i < n_; ++i) rayleigh += Jv[i] * Jv[i];
            const double nw = norm2(w);
            if (nw == 0.0) return std::sqrt(rayleigh);
            for (std::size_t j = 0; j < n_; ++j) v[j] = w[j] / nw;
        }
        return std::sqrt(rayleigh);
    }

private:
    std::size_t n_;
    std::vector<CompiledPolynomial> entries_;
};

/// sup of sigma_max(Df) over the ball grid.
inline double estimate_L(const VectorField& f, double radius, std::size_t grid_per_dim = 101)
{
    if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
    const CompiledJacobian jac(f);
    double best = 0.0;
    for_each_ball_grid_point(f.n(), radius, grid_per_dim,
                             [&](std::span<const double> x) { best = std::max(best, jac.sigma_max(x)); });
    return best;
}

/// sup of |f(x)| over the ball grid.
inline double estimate_Q(const VectorField& f, double radius, std::size_t grid_per_dim = 101)
{
    if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
    const CompiledField cf(f);
    double best = 0.0;
    for_each_ball_grid_point(f.n(), radius, grid_per_dim,
                             [&](std::span<const double> x) { best = std::max(best, norm2(cf(x))); });
    return best;
}

inline EstimateReport estimate(const VectorField& f, double r, const EstimateOptions& opt = {})
{
    EstimateReport rep = estimate_K_lambda(f, r, opt);
    rep.L_hat = estimate_L(f, r, opt.grid_per_dim);
    return rep;
}

}  // namespace convlyap
