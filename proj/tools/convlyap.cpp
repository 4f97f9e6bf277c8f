// convlyap: degree bounds, converse Lyapunov construction, verification,
// stability-data estimation and SOS problem export for polynomial fields.
//
// Exit codes: 0 success or feasible, 2 negative verdict, 3 term cap exceeded,
// 64 usage or malformed input, 1 internal failure.

#include "convlyap/json_io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace convlyap;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 2;
constexpr int kExitCap = 3;
constexpr int kExitUsage = 64;
constexpr int kExitInternal = 1;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

VectorField load_system(const std::string& path)
{
    try {
        return parse_system(read_file(path));
    } catch (const ParseError& e) {
        throw UsageError(path + ": " + e.what());
    }
}

std::size_t term_cap()
{
    const char* env = std::getenv("CONVLYAP_TERM_CAP");
    if (!env || !*env) return kDefaultTermCap;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || v == 0) throw UsageError("CONVLYAP_TERM_CAP must be a positive integer");
    return std::size_t(v);
}

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

std::string fmt(double v) { return shortest(v); }

struct DataFlags {
    StabilityData data;
    void add(CLI::App* cmd)
    {
        cmd->add_option("--K", data.K, "overshoot constant, >= 1")->required();
        cmd->add_option("--lambda", data.lambda, "exponential decay rate, > 0");
        cmd->add_option("--L", data.L, "Lipschitz bound of f on B_4Kr, > 0")->required();
        cmd->add_option("--r", data.r, "region radius, > 0")->required();
        cmd->add_option("--q", data.q, "degree of f, >= 1")->required();
    }
};

struct SearchFlags {
    SearchOptions opt;
    void add(CLI::App* cmd)
    {
        cmd->add_option("--tgrid", opt.t_grid, "number of T grid points in (0, 1/(2L))")->capture_default_str();
        cmd->add_option("--kmax", opt.k_max, "largest Picard iteration count tried")->capture_default_str();
        cmd->add_flag("--free-delta", opt.free_delta, "sweep delta jointly with T instead of fixing it");
        cmd->add_option("--delta-grid", opt.delta_grid, "delta grid size with --free-delta")->capture_default_str();
        cmd->add_option("--delta-span", opt.delta_span, "swept deltas cover (0, span * canonical delta]")
            ->capture_default_str();
    }
};

int cmd_bound(const StabilityData& data, const SearchOptions& opt, std::optional<double> T, std::optional<int> N,
              std::optional<int> k)
{
    if (T || N || k) {
        if (!(T && N && k)) throw UsageError("--T, --N and --k must be given together");
        const auto rep = check_conditions(data, *T, *N, *k);
        Json j = to_json(rep.values);
        j["feasible"] = rep.feasible();
        Json violated = Json::array();
        for (const auto& c : rep.violated) violated.push_back(c.name);
        j["violated"] = violated;
        emit(j);
        return rep.feasible() ? kExitOk : kExitNegative;
    }
    const auto out = search_bound(data, opt);
    Json j;
    if (out.best) {
        j = to_json(*out.best);
        j["feasible"] = true;
    } else {
        j = {{"data", to_json(data)}, {"feasible", false}};
    }
    j["evaluated"] = out.evaluated;
    j["search"] = {{"tgrid", opt.t_grid}, {"kmax", opt.k_max}, {"free_delta", opt.free_delta}};
    emit(j);
    return out.best ? kExitOk : kExitNegative;
}

int cmd_sweep(StabilityData data, const SearchOptions& opt, double from, double to, int steps)
{
    if (steps < 1) throw UsageError("--steps must be at least 1");
    if (!(from > 0.0) || !(to >= from)) throw UsageError("need 0 < --lambda-from <= --lambda-to");
    std::cout << "lambda,T,N,k,degree_bound,feasible\n";
    for (int i = 0; i < steps; ++i) {
        data.lambda = steps == 1 ? from : from + (to - from) * double(i) / double(steps - 1);
        const auto out = search_bound(data, opt);
        std::cout << fmt(data.lambda) << ",";
        if (out.best)
            std::cout << fmt(out.best->T) << "," << out.best->N << "," << out.best->k << ","
                      << out.best->degree_bound.get_str() << ",true\n";
        else
            std::cout << ",,,,false\n";
    }
    return kExitOk;
}

int cmd_construct(const std::string& system, int k, int N, const std::string& T_text, const std::string& delta_text,
                  bool inject_fault)
{
    const VectorField f = load_system(system);
    const Rational T = parse_rational(T_text);
    const Rational delta = parse_rational(delta_text);
    if (T <= 0 || delta <= 0) throw UsageError("--T and --delta must be positive");
    if (delta > T * N) throw UsageError("--delta must not exceed N T");

    const auto g = extend(f, k, N, T, term_cap());
    LyapunovResult res = construct_V(f, g, delta);
    if (inject_fault && !res.gram.blocks.empty()) res.gram.blocks.front().M(0, 0) += Rational(1, 7);

    const GramCheck check = check_gram(res);
    if (!check.ok()) {
        std::cerr << "convlyap: refusing to emit: Gram form "
                  << (check.reconstructs ? "has a block that is not PSD" : "does not reconstruct V") << "\n";
        return kExitInternal;
    }
    const std::uint32_t q = std::max<std::uint32_t>(f.q(), 1);
    emit({{"system", to_string(f)},
          {"n", f.n()},
          {"k", k},
          {"N", N},
          {"T", to_json(T)},
          {"delta", to_json(delta)},
          {"pieces_used", res.pieces_used},
          {"degree", res.V.degree()},
          {"degree_bound", big_to_json(degree_formula(q, std::uint64_t(N), std::uint64_t(k)))},
          {"V", to_json(res.V)},
          {"V_text", to_string(res.V)},
          {"gram", to_json(res.gram)},
          {"checks", {{"reconstructs", check.reconstructs}, {"blocks_psd", check.all_psd()}}}});
    return kExitOk;
}

// A Lyapunov file is a polynomial term list, a construct output with "V", or polynomial text.
Polynomial load_lyapunov(const std::string& path, std::size_t n)
{
    const std::string text = read_file(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
        Json j;
        try {
            j = Json::parse(text);
        } catch (const Json::parse_error& e) {
            throw UsageError(path + ": " + e.what());
        }
        try {
            Polynomial V = polynomial_from_json(j.is_object() ? j.at("V") : j, n);
            if (V.nvars() != n) throw UsageError(path + ": V has the wrong number of variables");
            return V;
        } catch (const Json::exception& e) {
            throw UsageError(path + ": " + e.what());
        } catch (const JsonFormatError& e) {
            throw UsageError(path + ": " + e.what());
        }
    }
    try {
        return parse_polynomial(text, n);
    } catch (const ParseError& e) {
        throw UsageError(path + ": " + e.what());
    }
}

int cmd_verify(const std::string& system, const std::string& lyapunov, double radius, std::size_t samples,
               double tolerance)
{
    const VectorField f = load_system(system);
    const Polynomial V = load_lyapunov(lyapunov, f.n());
    const auto rep = check_lyapunov(V, f, radius, samples, tolerance);
    emit(to_json(rep));
    return rep.decreasing ? kExitOk : kExitNegative;
}

int cmd_estimate(const std::string& system, double radius, const EstimateOptions& opt)
{
    const VectorField f = load_system(system);
    if (!(opt.h > 0.0) || !(opt.t_end > 0.0)) throw UsageError("--h and --tend must be positive");
    const auto rep = estimate(f, radius, opt);
    emit(to_json(rep));
    if (!rep.stable()) {
        std::cerr << "convlyap: trajectories do not decay; the origin looks unstable on this ball\n";
        return kExitNegative;
    }
    return kExitOk;
}

int cmd_simulate(const std::string& system, const std::vector<double>& x0, double t_end, double h)
{
    const VectorField f = load_system(system);
    if (x0.size() != f.n()) throw UsageError("--x0 needs " + std::to_string(f.n()) + " values");
    const auto tr = simulate(f, x0, t_end, h);
    tr.write_csv(std::cout);
    if (tr.diverged) {
        std::cerr << "convlyap: trajectory exceeded the blowup threshold at t = " << fmt(tr.times.back()) << "\n";
        return kExitNegative;
    }
    return kExitOk;
}

int cmd_export_sos(const std::string& system, double radius, int degree, const std::string& form)
{
    const VectorField f = load_system(system);
    if (degree < 2 || degree % 2 != 0) throw UsageError("--degree must be a positive even integer");
    emit(to_json(export_sos(f, radius, std::uint32_t(degree),
                            form == "thm5" ? SosForm::ThreeMultiplier : SosForm::FourMultiplier)));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Converse SOS Lyapunov functions for polynomial vector fields"};
    app.require_subcommand(1);
    std::function<int()> run;

    DataFlags bound_data;
    SearchFlags bound_search;
    std::optional<double> bound_T;
    std::optional<int> bound_N, bound_k;
    auto* bound = app.add_subcommand("bound", "search (T, N, k) for the smallest degree bound");
    bound_data.add(bound);
    bound->get_option("--lambda")->required();
    bound_search.add(bound);
    bound->add_option("--T", bound_T, "evaluate the conditions at this T instead of searching");
    bound->add_option("--N", bound_N, "piece count for --T");
    bound->add_option("--k", bound_k, "Picard iteration count for --T");
    bound->callback([&] { run = [&] { return cmd_bound(bound_data.data, bound_search.opt, bound_T, bound_N, bound_k); }; });

    DataFlags sweep_data;
    SearchFlags sweep_search;
    double lambda_from = 0, lambda_to = 0;
    int steps = 0;
    auto* sweep = app.add_subcommand("sweep", "degree bound versus decay rate, as CSV");
    sweep_data.add(sweep);
    sweep->remove_option(sweep->get_option("--lambda"));
    sweep_search.add(sweep);
    sweep->add_option("--lambda-from", lambda_from, "first decay rate")->required();
    sweep->add_option("--lambda-to", lambda_to, "last decay rate")->required();
    sweep->add_option("--steps", steps, "number of decay rates")->required();
    sweep->callback([&] { run = [&] { return cmd_sweep(sweep_data.data, sweep_search.opt, lambda_from, lambda_to, steps); }; });

    std::string con_system, con_T, con_delta;
    int con_k = 0, con_N = 0;
    bool con_fault = false;
    auto* construct = app.add_subcommand("construct", "build V and its Gram certificate");
    construct->add_option("--system", con_system, "vector field file")->required();
    construct->add_option("--k", con_k, "Picard iterations, >= 1")->required();
    construct->add_option("--N", con_N, "number of pieces, >= 1")->required();
    construct->add_option("--T", con_T, "piece width, exact rational such as 1/4")->required();
    construct->add_option("--delta", con_delta, "integration horizon, <= N T")->required();
    construct->add_flag("--inject-fault", con_fault)->group("");
    construct->callback([&] { run = [&] { return cmd_construct(con_system, con_k, con_N, con_T, con_delta, con_fault); }; });

    std::string ver_system, ver_lyap;
    double ver_radius = 0, ver_tol = 0;
    std::size_t ver_samples = 1000;
    auto* verify = app.add_subcommand("verify", "sampled check of the Lyapunov inequalities");
    verify->add_option("--system", ver_system, "vector field file")->required();
    verify->add_option("--lyapunov", ver_lyap, "file holding V: JSON terms, construct output, or polynomial text")->required();
    verify->add_option("--radius", ver_radius, "ball radius")->required();
    verify->add_option("--samples", ver_samples, "quasi-random sample count")->capture_default_str();
    verify->add_option("--tolerance", ver_tol, "decreasing iff gamma_hat exceeds this")->capture_default_str();
    verify->callback([&] { run = [&] { return cmd_verify(ver_system, ver_lyap, ver_radius, ver_samples, ver_tol); }; });

    std::string est_system;
    double est_radius = 0;
    EstimateOptions est_opt;
    auto* est = app.add_subcommand("estimate", "estimate K, lambda and L from simulation");
    est->set_help_flag("--help", "print this help and exit");
    est->add_option("--system", est_system, "vector field file")->required();
    est->add_option("--radius", est_radius, "radius of the sampled sphere and of the L ball")->required();
    est->add_option("--samples", est_opt.samples, "initial states")->capture_default_str();
    est->add_option("--tend", est_opt.t_end, "simulation horizon")->capture_default_str();
    est->add_option("--h", est_opt.h, "RK4 step")->capture_default_str();
    est->add_option("--grid", est_opt.grid_per_dim, "grid points per dimension for L")->capture_default_str();
    est->add_option("--tail", est_opt.tail_fraction, "fraction of the horizon used for the decay fit")
        ->capture_default_str();
    est->callback([&] { run = [&] { return cmd_estimate(est_system, est_radius, est_opt); }; });

    std::string sim_system;
    std::vector<double> sim_x0;
    double sim_tend = 10, sim_h = 1e-3;
    auto* sim = app.add_subcommand("simulate", "RK4 trajectory as CSV");
    sim->set_help_flag("--help", "print this help and exit");
    sim->add_option("--system", sim_system, "vector field file")->required();
    sim->add_option("--x0", sim_x0, "initial state, comma separated")->required()->delimiter(',');
    sim->add_option("--tend", sim_tend, "horizon")->capture_default_str();
    sim->add_option("--h", sim_h, "RK4 step")->capture_default_str();
    sim->callback([&] { run = [&] { return cmd_simulate(sim_system, sim_x0, sim_tend, sim_h); }; });

    std::string sos_system, sos_form = "thm3";
    double sos_radius = 0;
    int sos_degree = 0;
    auto* sos = app.add_subcommand("export-sos", "emit SOS feasibility problem data");
    sos->add_option("--system", sos_system, "vector field file")->required();
    sos->add_option("--radius", sos_radius, "ball radius")->required();
    sos->add_option("--degree", sos_degree, "degree 2d of V, even")->required();
    sos->add_option("--form", sos_form, "thm3 (four multipliers) or thm5 (three)")
        ->check(CLI::IsMember({"thm3", "thm5"}))
        ->capture_default_str();
    sos->callback([&] { run = [&] { return cmd_export_sos(sos_system, sos_radius, sos_degree, sos_form); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        return run();
    } catch (const TermCapExceeded& e) {
        std::cerr << "convlyap: " << e.what() << "\n";
        return kExitCap;
    } catch (const std::invalid_argument& e) {
        std::cerr << "convlyap: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "convlyap: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "convlyap: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
