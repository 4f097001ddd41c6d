#include <cstdlib>
#include <iostream>
#include <iterator>

#include <CLI11.hpp>

#include "cartan_eds/cli.hpp"
#include "catalog_data.hpp"

int main(int argc, char** argv) {
    using cartan::cli::CommandRequest;
    CommandRequest req;
    CLI::App app{"Structural invariants of Pfaffian systems and first-order PDE systems", "cartan-eds"};
    app.set_version_flag("--version", "cartan-eds 0.1.0");

    app.add_option("command", req.command, "Command to run")->required()->check(CLI::IsMember(cartan::cli::command_names()));
    app.add_option("input", req.input, "Input document ('-' for stdin)");
    app.add_option("--text", req.text, "Inline input document");
    app.add_option("--system", req.system, "Pfaffian system to use");
    app.add_option("--pde", req.pde, "PDE system to use");
    app.add_option("--point", req.points, "Named point (repeatable)");
    app.add_option("--element", req.elements, "Named field spanning the integral element (repeatable)");
    app.add_option("--field", req.field, "Named vector field");
    app.add_option("--function", req.function, "Named function");
    app.add_option("--functions", req.functions, "Two named functions, comma separated")->delimiter(',');
    app.add_option("--form", req.form, "Generator position (1-based) for darboux-class");
    app.add_option("--modulo", req.modulo, "Generator positions (1-based) to reduce by")->delimiter(',');
    app.add_option("--coframe", req.coframe, "System whose forms complete the coframe");
    app.add_option("--strategy", req.strategy, "Character chain strategy")
        ->check(CLI::IsMember({"deterministic", "first-pivot", "seeded-random"}));
    app.add_option("--seed", req.seed, "Random seed (falls back to CARTAN_EDS_SEED)");
    app.add_option("--n", req.n, "Number of independent variables for contact-build");
    app.add_option("--order", req.order, "Jet order for contact-build");
    app.add_flag("--jacobi", req.jacobi, "Jacobi bracket");
    app.add_flag("--lagrange", req.lagrange, "Lagrange bracket");
    app.add_flag("--sampled", req.sampled, "Check integrability at sampled points");
    app.add_option("--samples", req.samples, "Number of sample points");
    app.add_option("--catalog", req.catalog_path, "Catalog file instead of the built-in one");
    app.add_flag("--json", req.json, "Emit the JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (const char* s = std::getenv("CARTAN_EDS_SEED")) req.env_seed = s;
    req.builtin_catalog = cartan::kBuiltinCatalog;
    if (req.input && *req.input == "-" && !req.text)
        req.stdin_text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());

    auto res = cartan::cli::run(req);
    std::cout << res.out;
    std::cerr << res.err;
    return res.exit_code;
}
