#include "gnormal/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gnormal/analysis.hpp"
#include "gnormal/auxiliary.hpp"
#include "gnormal/backward.hpp"
#include "gnormal/forward.hpp"
#include "gnormal/io.hpp"
#include "gnormal/montecarlo.hpp"
#include "gnormal/payoff.hpp"

namespace gnormal::cli {

namespace {

using nlohmann::json;

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw ConfigError("cannot open '" + path + "' for writing");
    }
    f << content;
    if (!f) {
        throw ConfigError("failed writing '" + path + "'");
    }
}

GParams params_of(const RunConfig& cfg)
{
    return {cfg.sigma_lo_sq, cfg.sigma_hi_sq, cfg.horizon};
}

Grid grid_of(const RunConfig& cfg)
{
    return build_grid(params_of(cfg), cfg.n_steps, cfg.ratio, cfg.strict_cfl);
}

json base_report(const RunConfig& cfg, const Grid& grid, double expectation)
{
    return json{{"expectation", expectation},
                {"n_steps", grid.n_steps},
                {"h", grid.h},
                {"dt", grid.dt},
                {"cfl", grid.cfl},
                {"payoff", cfg.payoff_spec},
                {"sigma_lo_sq", cfg.sigma_lo_sq},
                {"sigma_hi_sq", cfg.sigma_hi_sq},
                {"horizon", cfg.horizon}};
}

std::string dump(const json& j)
{
    return j.dump(2) + "\n";
}

double duality_gap(const ForwardResult& fwd, const BackwardSolution& sol, const Payoff& payoff)
{
    return std::abs(expectation_forward(fwd.terminal, payoff) - sol.root);
}

int cmd_value(const RunConfig& cfg, std::ostream& out)
{
    const Grid grid = grid_of(cfg);
    const Payoff payoff = make_payoff(cfg.payoff_spec);
    const BackwardSolution sol = solve_backward(grid, payoff, cfg.tol);
    json report = base_report(cfg, grid, expectation(sol));
    report["ratio"] = cfg.ratio;
    report["tol"] = cfg.tol;
    const std::string text = dump(report);
    out << text;
    if (!cfg.out_prefix.empty()) {
        write_file(cfg.out_prefix + ".json", text);
    }
    return kSuccess;
}

int cmd_density(const RunConfig& cfg, std::ostream& out)
{
    const Grid grid = grid_of(cfg);
    const Payoff payoff = make_payoff(cfg.payoff_spec);
    const BackwardSolution sol = solve_backward(grid, payoff, cfg.tol);
    const ForwardResult fwd = propagate(sol);
    const DensityTable table = density(fwd.terminal);

    const std::string prefix = cfg.out_prefix.empty() ? "density" : cfg.out_prefix;
    const bool as_json = cfg.output_format == OutputFormat::json;
    const std::string table_path = prefix + (as_json ? ".json" : ".csv");
    write_file(table_path, as_json ? io::density_json(table) : io::density_csv(table));

    json meta = base_report(cfg, grid, sol.root);
    meta["duality_gap"] = duality_gap(fwd, sol, payoff);
    const std::string text = dump(meta);
    write_file(prefix + ".meta.json", text);
    out << text;
    return kSuccess;
}

int cmd_sample(const RunConfig& cfg, std::ostream& out)
{
    const Grid grid = grid_of(cfg);
    const Payoff payoff = make_payoff(cfg.payoff_spec);
    const BackwardSolution sol = solve_backward(grid, payoff, cfg.tol);
    const ForwardResult fwd = propagate(sol);
    const SampleSet set = sample_paths(sol, cfg.samples, cfg.seed, cfg.threads);

    const std::string prefix = cfg.out_prefix.empty() ? "histogram" : cfg.out_prefix;
    write_file(prefix + ".csv", io::histogram_csv(histogram_rows(set)));

    const MeanCheck mean = check_mean(set, fwd.terminal);
    json meta = base_report(cfg, grid, sol.root);
    meta["duality_gap"] = duality_gap(fwd, sol, payoff);
    meta["seed"] = cfg.seed;
    meta["samples"] = cfg.samples;
    meta["tv_distance"] = tv_distance(set, fwd.terminal);
    meta["mean_z_score"] = mean.z_score;
    meta["mean_flagged"] = mean.flagged;
    const std::string text = dump(meta);
    write_file(prefix + ".meta.json", text);
    out << text;
    return kSuccess;
}

std::vector<int> parse_n_list(const std::string& text)
{
    std::vector<int> ns;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string item =
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        try {
            std::size_t used = 0;
            const int n = std::stoi(item, &used);
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
            ns.push_back(n);
        } catch (const std::exception&) {
            throw InvalidParam("invalid entry '" + item + "' in --n-list");
        }
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return ns;
}

struct ConvergeOptions {
    std::string mode = "density";
    std::string n_list = "100,200,400,800";
    int n_ref = 3200;
    double t_eval = 0.5;
    bool window_given = false;
    std::string flux_terminal = "discrete";
    std::string l2_nodes = "reference";
};

int cmd_converge(const RunConfig& cfg, const ConvergeOptions& opts, std::ostream& out)
{
    const Payoff payoff = make_payoff(cfg.payoff_spec);
    const std::vector<int> ns = parse_n_list(opts.n_list);
    const StudyConfig study{params_of(cfg), cfg.ratio, cfg.tol, cfg.strict_cfl};
    std::string csv;
    if (opts.mode == "density") {
        const L2Nodes nodes = opts.l2_nodes == "coarse" ? L2Nodes::coarse : L2Nodes::reference;
        csv = io::density_study_csv(
            refine_study_density(study, payoff, ns, opts.n_ref, cfg.window, nodes));
    } else if (opts.mode == "curvature") {
        const Interval window = opts.window_given ? cfg.window : kWholeLevel;
        const FluxTerminal terminal =
            opts.flux_terminal == "analytic" ? FluxTerminal::analytic : FluxTerminal::discrete;
        csv = io::curvature_study_csv(
            refine_study_curvature(study, payoff, ns, opts.n_ref, opts.t_eval, window, terminal));
    } else {
        throw InvalidParam("--mode must be 'density' or 'curvature'");
    }
    const std::string prefix = cfg.out_prefix.empty() ? "converge_" + opts.mode : cfg.out_prefix;
    write_file(prefix + ".csv", csv);
    out << csv;
    return kSuccess;
}

json report_json(const ControlConvergenceReport& r)
{
    return json{{"max_w_discrepancy", r.max_w_discrepancy},
                {"max_v_discrepancy", r.max_v_discrepancy},
                {"max_scaled_w_discrepancy", r.max_scaled_w_discrepancy},
                {"control_mismatches", r.control_mismatches},
                {"nodes_compared", r.nodes_compared}};
}

int cmd_wstudy(const RunConfig& cfg, std::ostream& out)
{
    const Grid grid = grid_of(cfg);
    const Payoff payoff = make_payoff(cfg.payoff_spec);
    const BackwardSolution sol = solve_backward(grid, payoff, cfg.tol);
    const FluxSolution discrete = solve_w_scheme(grid, payoff, cfg.tol, FluxTerminal::discrete);
    const FluxSolution analytic = solve_w_scheme(grid, payoff, cfg.tol, FluxTerminal::analytic);

    json report = base_report(cfg, grid, sol.root);
    report["discrete_terminal"] = report_json(control_convergence_report(sol, discrete));
    report["analytic_terminal"] = report_json(control_convergence_report(sol, analytic));
    report["flux_terminal_sup"] = analytic.terminal_sup;
    report["flux_lattice_sup"] = analytic.lattice_sup;
    const std::string text = dump(report);
    out << text;
    if (!cfg.out_prefix.empty()) {
        write_file(cfg.out_prefix + ".json", text);
    }
    return kSuccess;
}

void add_common_options(CLI::App& sub, RunConfig& cfg)
{
    sub.add_option("--payoff", cfg.payoff_spec,
                   "builtin (square, neg_square, sin3x, cube) or expression in x");
    sub.add_option("--sigma-lo-sq", cfg.sigma_lo_sq, "lower variance bound");
    sub.add_option("--sigma-hi-sq", cfg.sigma_hi_sq, "upper variance bound");
    sub.add_option("--horizon", cfg.horizon, "time horizon T");
    sub.add_option("--steps", cfg.n_steps, "number of time steps N");
    sub.add_option("--ratio", cfg.ratio, "mesh ratio, h = sqrt(sigma_hi_sq dt) * ratio");
    sub.add_option("--tol", cfg.tol, "switching tolerance of the control");
    sub.add_flag("--strict-cfl", cfg.strict_cfl, "require sigma_hi_sq dt / h^2 <= 1/2");
    sub.add_option("--out", cfg.out_prefix, "output path prefix");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    RunConfig cfg;
    ConvergeOptions conv;
    std::string format = "csv";

    CLI::App app{"G-expectation, optimal volatility control and responsive distribution of a "
                 "G-normal random variable on a trinomial lattice",
                 "gnormal"};
    app.require_subcommand(1);

    auto* value = app.add_subcommand("value", "G-expectation at the root of the backward tree");
    auto* dens = app.add_subcommand("density", "terminal law of the optimally controlled chain");
    auto* sample = app.add_subcommand("sample", "Monte Carlo histogram of the controlled chain");
    auto* converge = app.add_subcommand("converge", "grid-refinement study");
    auto* wstudy = app.add_subcommand("wstudy", "flux recursion against the value lattice");

    for (auto* sub : {value, dens, sample, converge, wstudy}) {
        add_common_options(*sub, cfg);
    }
    dens->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sample->add_option("--samples", cfg.samples, "number of paths");
    sample->add_option("--seed", cfg.seed, "master seed");
    sample->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
    converge->add_option("--mode", conv.mode, "density or curvature")
        ->check(CLI::IsMember({"density", "curvature"}));
    converge->add_option("--n-list", conv.n_list, "comma-separated coarse step counts");
    converge->add_option("--n-ref", conv.n_ref, "reference step count");
    converge->add_option("--t-eval", conv.t_eval, "evaluation time of the curvature study");
    converge->add_option("--l2-nodes", conv.l2_nodes,
                         "density study quadrature nodes: reference or coarse")
        ->check(CLI::IsMember({"reference", "coarse"}));
    converge->add_option("--flux-terminal", conv.flux_terminal,
                         "curvature study flux start: discrete or analytic")
        ->check(CLI::IsMember({"discrete", "analytic"}));
    auto* wlo = converge->add_option(
        "--window-lo", cfg.window.lo,
        "window lower end (density default -3; curvature default whole level)");
    auto* whi = converge->add_option("--window-hi", cfg.window.hi, "window upper end");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) {
        reversed.pop_back();
    }
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        const CLI::App* which = &app;
        for (auto* sub : app.get_subcommands()) {
            which = sub;
        }
        if (e.get_exit_code() == 0) {
            out << which->help();
            return kSuccess;
        }
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }

    cfg.output_format = format == "json" ? OutputFormat::json : OutputFormat::csv;
    conv.window_given = wlo->count() > 0 || whi->count() > 0;

    try {
        if (value->parsed()) {
            return cmd_value(cfg, out);
        }
        if (dens->parsed()) {
            return cmd_density(cfg, out);
        }
        if (sample->parsed()) {
            return cmd_sample(cfg, out);
        }
        if (converge->parsed()) {
            return cmd_converge(cfg, conv, out);
        }
        if (wstudy->parsed()) {
            return cmd_wstudy(cfg, out);
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << "\n";
        return kNumericalError;
    }
    return kConfigError;
}

}  // namespace gnormal::cli
