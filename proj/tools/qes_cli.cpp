// Command-line front end: spectrum, potential, wavefunction, verify, residual.
// Exit status: 0 verified, 1 usage or configuration error, 2 verification failure.

#include <qes/pipeline.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_failed = 2;

// Flag values are staged here and only copied into the config when the
// flag was given, so that config-file values survive.
struct Staged
{
    std::vector<std::function<void(qes::RunConfig&)>> appliers;
};

template <typename T, typename Set>
void flag(CLI::App& app, Staged& staged, const std::string& name, const std::string& help, Set set)
{
    auto value = std::make_shared<T>();
    auto* opt = app.add_option(name, *value, help);
    staged.appliers.push_back([opt, value, set](qes::RunConfig& c) {
        if (opt->count() > 0) set(c, *value);
    });
}

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw qes::InvalidArgument("cannot open output file '" + path + "'");
    os << text;
    if (!os) throw qes::InvalidArgument("failed writing '" + path + "'");
}

std::pair<std::string, double> split_param(const std::string& s)
{
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw qes::InvalidArgument("mass parameter must look like name=value: " + s);
    const std::string name = s.substr(0, eq);
    const std::string text = s.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw qes::InvalidArgument("mass parameter value is not a number: " + s);
    return {name, v};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quasi-exactly solvable position-dependent-mass potentials: spectra, potentials, "
                 "wavefunctions and numerical verification"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    Staged staged;
    std::string config_path;
    app.add_option("--config", config_path, "JSON file mirroring the flags (flags take precedence)");

    using C = qes::RunConfig;
    flag<std::string>(app, staged, "--family", "sextic | coulomb | morse | general",
                      [](C& c, const std::string& v) { c.family = qes::family_from_string(v); });
    flag<double>(app, staged, "--ell", "angular parameter l", [](C& c, double v) { c.ell = v; });
    flag<double>(app, staged, "--b", "parameter b", [](C& c, double v) { c.b = v; });
    flag<double>(app, staged, "--q", "parameter q", [](C& c, double v) { c.q = v; });
    flag<double>(app, staged, "--j", "spin j (integer or half-integer)", [](C& c, double v) { c.j = v; });
    flag<double>(app, staged, "--alpha", "ordering exponent alpha", [](C& c, double v) { c.alpha = v; });
    flag<double>(app, staged, "--beta", "ordering exponent beta (gamma = -1 - alpha - beta)",
                 [](C& c, double v) { c.beta = v; });
    flag<std::string>(app, staged, "--mass", "mass expression in x, or constant | rational2 | quadratic",
                      [](C& c, const std::string& v) { c.mass = v; });
    flag<std::vector<std::string>>(app, staged, "--mass-param", "name=value, repeatable",
                                   [](C& c, const std::vector<std::string>& v) {
                                       for (const auto& s : v) {
                                           const auto [name, value] = split_param(s);
                                           c.mass_params[name] = value;
                                       }
                                   });
    flag<double>(app, staged, "--lambda0", "general family lambda0", [](C& c, double v) { c.lambda0 = v; });
    flag<double>(app, staged, "--lambda1", "general family lambda1", [](C& c, double v) { c.lambda1 = v; });
    flag<double>(app, staged, "--lambda2", "general family lambda2", [](C& c, double v) { c.lambda2 = v; });
    flag<double>(app, staged, "--r0", "general family r(x_min)", [](C& c, double v) { c.r0 = v; });
    flag<double>(app, staged, "--energy", "energy E (general family)", [](C& c, double v) { c.energy = v; });
    flag<double>(app, staged, "--xmin", "grid start", [](C& c, double v) { c.x_min = v; });
    flag<double>(app, staged, "--xmax", "grid end", [](C& c, double v) { c.x_max = v; });
    flag<std::size_t>(app, staged, "--n", "grid points", [](C& c, std::size_t v) { c.n = v; });
    flag<double>(app, staged, "--u-origin", "x where u = 0 (default: 0 clamped into the grid)",
                 [](C& c, double v) { c.u_origin = v; });
    flag<int>(app, staged, "--epsilon-index", "state index in ascending epsilon", [](C& c, int v) { c.epsilon_index = v; });
    flag<std::string>(app, staged, "--out", "output path (default stdout)", [](C& c, const std::string& v) { c.out = v; });
    flag<std::string>(app, staged, "--format", "csv | json", [](C& c, const std::string& v) { c.format = v; });
    flag<double>(app, staged, "--tol-root", "root tolerance", [](C& c, double v) { c.tol.root = v; });
    flag<double>(app, staged, "--tol-residual", "residual tolerance", [](C& c, double v) { c.tol.residual = v; });
    flag<double>(app, staged, "--tol-match", "eigenvalue match tolerance", [](C& c, double v) { c.tol.match = v; });
    flag<double>(app, staged, "--debug-shift", "add this offset to every algebraic energy",
                 [](C& c, double v) { c.debug_shift = v; });

    for (const char* name : {"spectrum", "potential", "wavefunction", "verify", "residual"}) app.add_subcommand(name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    try {
        qes::RunConfig cfg;
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) throw qes::InvalidArgument("cannot open config file '" + config_path + "'");
            qes::json j;
            try {
                is >> j;
            } catch (const qes::json::exception& e) {
                throw qes::InvalidArgument(std::string("config file is not valid JSON: ") + e.what());
            }
            qes::apply_json(cfg, j);
        }
        for (const auto& apply : staged.appliers) apply(cfg);
        cfg.command = app.get_subcommands().front()->get_name();

        const auto res = qes::run_command(cfg);
        const bool tabular = !res.csv.empty() && cfg.format == "csv";
        if (tabular) {
            write_text(cfg.out, res.csv);
            if (!cfg.out.empty()) write_text(cfg.out + ".json", res.report.dump(2) + "\n");
        } else {
            write_text(cfg.out, res.report.dump(2) + "\n");
        }
        if (!res.ok) {
            std::cerr << "verification failed (see report)\n";
            return exit_failed;
        }
        return exit_ok;
    } catch (const qes::Error& e) {
        std::cerr << "error [" << e.category() << "]: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
}
