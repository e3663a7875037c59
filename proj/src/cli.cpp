#include "wg/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "wg/study.hpp"

namespace wg {

namespace {

const std::vector<std::string> kProblems = {"cdr-smooth", "cdr-layer", "maxwell2d", "transport"};

std::vector<int> parse_levels(const std::string& text) {
    int lo = 0, hi = 0;
    const auto colon = text.find(':');
    try {
        if (colon == std::string::npos) {
            lo = hi = std::stoi(text);
        } else {
            lo = std::stoi(text.substr(0, colon));
            hi = std::stoi(text.substr(colon + 1));
        }
    } catch (const std::exception&) {
        throw CliError("invalid --levels '" + text + "', expected a:b");
    }
    if (lo < 1 || hi < lo) throw CliError("invalid --levels '" + text + "', need 1 <= a <= b");
    std::vector<int> levels;
    for (int l = lo; l <= hi; ++l) levels.push_back(l);
    return levels;
}

ManufacturedProblem make_problem(const RunConfig& config) {
    if (config.problem == "cdr-smooth") return manufactured_cdr_smooth(config.epsilon);
    if (config.problem == "cdr-layer") return manufactured_cdr_layer(config.epsilon);
    if (config.problem == "maxwell2d") return manufactured_maxwell();
    if (config.problem == "transport") return manufactured_transport();
    throw CliError("unknown problem '" + config.problem + "'");
}

void configure_app(CLI::App& app, RunConfig& config, std::string& levels_text) {
    app.description("Weak Galerkin solver for positive symmetric hyperbolic systems");
    app.add_option("--problem", config.problem, "Problem: cdr-smooth | cdr-layer | maxwell2d | transport")
        ->required();
    app.add_option("--degree", config.degree, "Polynomial degree k >= 0")->default_val(1);
    app.add_option("--levels", levels_text, "Refinement levels a:b (inclusive)")->default_val("3:5");
    app.add_option("--epsilon", config.epsilon, "Diffusion parameter (cdr problems only)");
    app.add_option("--mu", config.mu_override, "Override the stabilization parameter");
    app.add_option("--mesh", config.mesh, "Mesh family: square | polygonal | file:<path>")->default_val("square");
    app.add_option("--out", config.out_path, "Output CSV path (default stdout)");
    app.add_flag("--dump-solution", config.dump_solution, "Also dump per-cell centroid values of u0");
}

}  // namespace

std::string usage() {
    RunConfig config;
    std::string levels_text;
    CLI::App app;
    configure_app(app, config, levels_text);
    return app.help();
}

RunConfig parse_args(const std::vector<std::string>& args) {
    RunConfig config;
    std::string levels_text;
    CLI::App app;
    configure_app(app, config, levels_text);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw CliHelpRequested{};
    } catch (const CLI::ParseError& err) {
        throw CliError(err.what());
    }

    if (std::find(kProblems.begin(), kProblems.end(), config.problem) == kProblems.end())
        throw CliError("unknown problem '" + config.problem + "'");
    if (config.degree < 0) throw CliError("--degree must be >= 0");
    config.levels = parse_levels(levels_text);

    const bool is_cdr = config.problem.rfind("cdr-", 0) == 0;
    if (app.count("--epsilon") > 0 && !is_cdr)
        throw CliError("epsilon is not a " + config.problem + " parameter");
    if (config.epsilon <= 0.0 || config.epsilon > 1.0) throw CliError("--epsilon must lie in (0, 1]");

    if (config.mesh != "square" && config.mesh != "polygonal" && config.mesh.rfind("file:", 0) != 0)
        throw CliError("unknown mesh '" + config.mesh + "', expected square, polygonal or file:<path>");

    if (config.mu_override) {
        if (*config.mu_override <= 0.0) throw CliError("--mu must be positive");
        ManufacturedProblem problem = make_problem(config);
        try {
            problem.system.set_mu(*config.mu_override);  // quotes the rho(D_n)/2 bound
        } catch (const std::invalid_argument& err) {
            throw CliError(err.what());
        }
    }
    return config;
}

namespace {

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << text;
}

std::string centroid_dump(const FriedrichsSystem& sys, const WeakMesh& mesh, const DofMap& dofs,
                          const Vector& u0) {
    std::string csv = "x,y";
    for (int i = 0; i < sys.m; ++i) csv += ",comp" + std::to_string(i);
    csv += "\n";
    char buf[64];
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const Vec2 p = mesh.cell_meta[c].centroid;
        std::snprintf(buf, sizeof buf, "%.6g,%.6g", p.x, p.y);
        csv += buf;
        // At the centroid every non-constant scaled monomial vanishes.
        for (int i = 0; i < sys.m; ++i) {
            std::snprintf(buf, sizeof buf, ",%.6g", u0[dofs.cell_offset(c) + i * dofs.n_k]);
            csv += buf;
        }
        csv += "\n";
    }
    return csv;
}

int run_on_file_mesh(const RunConfig& config, const ManufacturedProblem& problem) {
    const WeakMesh mesh = load_mesh(config.mesh.substr(5));
    const AdmissibilityReport report = check_admissibility(problem.system, mesh);
    if (!report.pass) {
        std::cerr << "admissibility check failed: " << report.summary() << "\n";
        return 2;
    }
    const CondensedOperator op = assemble_condensed(problem.system, mesh, config.degree);
    Vector u0 = solve_condensed(op, 1e-12);
    const WeakVector u_h = recover_edge_unknowns(op, std::move(u0));

    ConvergenceTable table;
    ConvergenceRow row;
    row.level = 1;
    row.h = mesh.h;
    row.dofs = op.dofs.n0();
    row.err_l2 = l2_error(problem.system, mesh, config.degree, u_h);
    row.err_triple = triple_error(problem.system, mesh, config.degree, u_h);
    table.rows.push_back(row);
    write_text(config.out_path, to_csv(table));
    if (config.dump_solution) {
        const std::string path = config.out_path.empty() ? "solution.csv" : config.out_path + ".solution.csv";
        write_text(path, centroid_dump(problem.system, mesh, op.dofs, u_h.u0));
    }
    return 0;
}

}  // namespace

int run(const RunConfig& config) {
    try {
        ManufacturedProblem problem = make_problem(config);
        if (config.mu_override) problem.system.set_mu(*config.mu_override);

        if (config.mesh.rfind("file:", 0) == 0) return run_on_file_mesh(config, problem);

        const MeshFamily family = config.mesh == "square" ? MeshFamily::square : MeshFamily::polygonal;

        // Admissibility gate on the coarsest requested mesh.
        const WeakMesh gate_mesh = build_family_mesh(family, config.levels.front());
        const AdmissibilityReport report = check_admissibility(problem.system, gate_mesh);
        if (!report.pass) {
            std::cerr << "admissibility check failed: " << report.summary() << "\n";
            return 2;
        }

        ConvergenceTable table;
        try {
            run_convergence(problem, config.degree, config.levels, family, table);
        } catch (...) {
            if (!table.rows.empty()) {
                std::cerr << "study aborted after level " << table.rows.back().level
                          << "; partial table follows\n"
                          << to_csv(table);
            }
            throw;
        }
        write_text(config.out_path, to_csv(table));

        if (config.dump_solution) {
            const WeakMesh mesh = build_family_mesh(family, config.levels.back());
            const CondensedOperator op = assemble_condensed(problem.system, mesh, config.degree);
            Vector u0 = solve_condensed(op, 1e-12);
            const std::string path = config.out_path.empty() ? "solution.csv" : config.out_path + ".solution.csv";
            write_text(path, centroid_dump(problem.system, mesh, op.dofs, u0));
        }
        return 0;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
}

}  // namespace wg
