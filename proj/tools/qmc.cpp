// Command-line front end: solve / oracle / matching / audit / certify-alpha /
// ellipse-data, JSON (or CSV) on stdout, diagnostics on stderr.
//
// Exit codes: 0 success, 1 input error, 2 solver non-convergence.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "qmc/analysis.hpp"
#include "qmc/json_io.hpp"

extern "C" void openblas_set_num_threads(int);

namespace {

qmc::WeightedGraph load_graph(const std::string& path) {
    if (path == "-") return qmc::WeightedGraph::parse(std::cin);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file: " + path);
    return qmc::WeightedGraph::parse(in);
}

void apply_thread_cap() {
    const char* env = std::getenv("QMC_THREADS");
    if (!env) return;
    const int t = std::atoi(env);
    if (t > 0) openblas_set_num_threads(t);
}

void emit(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
    apply_thread_cap();

    CLI::App app{"Quantum Max Cut approximation toolkit"};
    app.require_subcommand(1);

    std::string graph_path;
    int level = 2;
    std::uint64_t seed = 0;
    int trials = 64;
    double tol = 1e-6;
    int max_iter = 200000;
    double audit_tol = 1e-5;
    double scale = 0.8;
    int samples = 256;
    std::uint32_t cap = qmc::kDefaultOracleCap;

    auto* solve = app.add_subcommand("solve", "run the full approximation pipeline");
    solve->add_option("graph", graph_path, "graph file ('-' for stdin)")->required();
    solve->add_option("--level", level, "relaxation level (1 or 2)")
        ->check(CLI::IsMember({1, 2}));
    solve->add_option("--seed", seed, "rounding seed");
    solve->add_option("--trials", trials, "rounded product states to try")
        ->check(CLI::PositiveNumber);
    solve->add_option("--tol", tol, "SDP residual tolerance")->check(CLI::PositiveNumber);
    solve->add_option("--max-iter", max_iter, "SDP iteration cap")
        ->check(CLI::PositiveNumber);
    solve->add_option("--audit-tol", audit_tol, "audit tolerance")
        ->check(CLI::PositiveNumber);

    auto* oracle = app.add_subcommand("oracle", "exact lambda_max by dense eigensolve");
    oracle->add_option("graph", graph_path, "graph file ('-' for stdin)")->required();
    oracle->add_option("--cap", cap, "qubit cap for the dense solve");

    auto* matching = app.add_subcommand("matching", "maximum weight matching");
    matching->add_option("graph", graph_path, "graph file ('-' for stdin)")->required();

    auto* audit = app.add_subcommand("audit", "solve, then audit every monogamy inequality");
    audit->add_option("graph", graph_path, "graph file ('-' for stdin)")->required();
    audit->add_option("--tol", audit_tol, "audit tolerance")->check(CLI::PositiveNumber);
    audit->add_option("--level", level, "relaxation level (1 or 2)")
        ->check(CLI::IsMember({1, 2}));
    audit->add_option("--sdp-tol", tol, "SDP residual tolerance")
        ->check(CLI::PositiveNumber);
    audit->add_option("--max-iter", max_iter, "SDP iteration cap")
        ->check(CLI::PositiveNumber);

    auto* certify = app.add_subcommand("certify-alpha", "certify the guarantee constant");
    certify->add_option("--scale", scale, "matching-LP scale in (0, 1]");

    auto* ellipse = app.add_subcommand("ellipse-data", "convexgamy figure data as CSV");
    ellipse->add_option("--samples", samples, "points per curve")
        ->check(CLI::Range(2, 1 << 20));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (solve->parsed()) {
            const auto g = load_graph(graph_path);
            qmc::RunOptions opts;
            opts.seed = seed;
            opts.trials = trials;
            opts.level = level;
            opts.tol = tol;
            opts.max_iter = max_iter;
            opts.audit_tol = audit_tol;
            emit(qmc::solve_json(qmc::run_algorithm(g, opts), g));
        } else if (oracle->parsed()) {
            const auto g = load_graph(graph_path);
            emit(qmc::oracle_json(g, qmc::max_energy(qmc::build_hamiltonian(g, cap))));
        } else if (matching->parsed()) {
            const auto g = load_graph(graph_path);
            emit(qmc::matching_json(qmc::max_weight_matching(g), g));
        } else if (audit->parsed()) {
            const auto g = load_graph(graph_path);
            auto sol = qmc::solve_sdp(qmc::build_moment_structure(g, level), g,
                                      {tol, max_iter});
            emit(qmc::audit_json(qmc::run_audits(sol, g, audit_tol)));
        } else if (certify->parsed()) {
            emit(qmc::certificate_json(qmc::certify_alpha(scale)));
        } else if (ellipse->parsed()) {
            std::cout << qmc::ellipse_csv(qmc::ellipse_region_data(samples));
        }
    } catch (const qmc::ConvergenceError& e) {
        std::cerr << "error: " << e.what() << " (primal residual " << e.primal_residual
                  << ", psd residual " << e.psd_residual << ")\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
