#include <qes/pipeline.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace qes;

namespace {

struct Run
{
    int status;
    std::string out;
};

Run run_cli(const std::string& args)
{
    const std::string cmd = std::string(QES_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    const int st = pclose(pipe);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::filesystem::path temp_file(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("qes_pipeline_" + name);
}

RunConfig sextic_config()
{
    RunConfig c;
    c.family = Family::Sextic;
    c.ell = 0;
    c.b = 0;
    c.q = 1;
    c.j = 0.5;
    return c;
}

double csv_value_at(const std::string& csv, double x, std::size_t column)
{
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (std::abs(std::stod(f[0]) - x) < 1e-12) return std::stod(f.at(column));
    }
    throw std::runtime_error("x not found in CSV");
}

} // namespace

TEST(Config, RoundTrip)
{
    RunConfig c = sextic_config();
    c.command = "verify";
    c.mass = "rational2";
    c.mass_params = {{"a", 3.0}};
    c.alpha = -0.5;
    c.beta = 0;
    c.x_max = 7.5;
    c.u_origin = 0.25;
    c.tol.match = 1e-3;
    const auto j1 = to_json(c);
    const auto back = config_from_json(j1);
    EXPECT_EQ(to_json(back).dump(), j1.dump());
    EXPECT_DOUBLE_EQ(j1.at("gamma").get<double>(), -0.5);
    EXPECT_DOUBLE_EQ(j1.at("xmin").get<double>(), 1e-3);
}

TEST(Config, RejectsUnknownKeysAndBadValues)
{
    EXPECT_THROW(config_from_json(json{{"famly", "sextic"}}), InvalidArgument);
    EXPECT_THROW(config_from_json(json{{"ell", "zero"}}), InvalidArgument);
    EXPECT_THROW(config_from_json(json{{"family", "quartic"}}), InvalidArgument);
    EXPECT_THROW(config_from_json(json{{"alpha", 0}, {"beta", -1}, {"gamma", 1}}), InvalidArgument);
    EXPECT_NO_THROW(config_from_json(json{{"alpha", 0}, {"beta", -1}, {"gamma", 0}}));
    EXPECT_THROW(config_from_json(json::array()), InvalidArgument);
}

TEST(Config, Validation)
{
    RunConfig c = sextic_config();
    c.format = "xml";
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = sextic_config();
    c.n = 10;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = sextic_config();
    c.j = 0.3;
    EXPECT_THROW(cmd_spectrum(c), InvalidArgument);
}

TEST(Spectrum, SexticHalfSpin)
{
    const auto r = cmd_spectrum(sextic_config());
    EXPECT_TRUE(r.ok);
    const auto roots = r.report.at("epsilon_roots").get<std::vector<double>>();
    ASSERT_EQ(roots.size(), 2u);
    EXPECT_NEAR(roots[0], -1.224745, 1e-6);
    EXPECT_NEAR(roots[1], 1.224745, 1e-6);
    EXPECT_NEAR(r.report.at("states")[0].at("energy").get<double>(), -2.449490, 1e-6);
    EXPECT_NEAR(r.report.at("states")[1].at("energy").get<double>(), 2.449490, 1e-6);
    EXPECT_LT(r.report.at("max_delta_matrix").get<double>(), 1e-10);
}

TEST(Spectrum, SexticSpinOne)
{
    RunConfig c = sextic_config();
    c.j = 1;
    const auto roots = cmd_spectrum(c).report.at("epsilon_roots").get<std::vector<double>>();
    ASSERT_EQ(roots.size(), 3u);
    EXPECT_NEAR(roots[0], -2.828427, 1e-6);
    EXPECT_NEAR(roots[1], 0.0, 1e-12);
    EXPECT_NEAR(roots[2], 2.828427, 1e-6);
}

TEST(Spectrum, MorseEnergyIsStateIndependent)
{
    RunConfig c = sextic_config();
    c.family = Family::Morse;
    c.ell = 1;
    c.j = 1.5;
    c.b = 0.4;
    const auto r = cmd_spectrum(c);
    ASSERT_EQ(r.report.at("states").size(), 4u);
    for (const auto& s : r.report.at("states")) EXPECT_DOUBLE_EQ(s.at("energy").get<double>(), -0.28125);
}

TEST(Spectrum, GeneralNeedsEnergy)
{
    RunConfig c = sextic_config();
    c.family = Family::General;
    c.lambda0 = 0.25;
    EXPECT_THROW(cmd_spectrum(c), InvalidArgument);
    c.energy = 1.0;
    EXPECT_TRUE(cmd_spectrum(c).ok);
}

TEST(Potential, HandValueAndDeterminism)
{
    RunConfig c = sextic_config();
    c.command = "potential";
    c.format = "csv";
    c.x_min = 0.0;
    c.x_max = 2.0;
    c.n = 21;
    const auto a = cmd_potential(c);
    EXPECT_NEAR(csv_value_at(a.csv, 1.0, 1), -4.0, 1e-12);
    EXPECT_EQ(a.report.at("excluded").size(), 1u);
    const auto b = cmd_potential(c);
    EXPECT_EQ(a.csv, b.csv);
    // header, LF endings, 17 significant digits
    EXPECT_EQ(a.csv.substr(0, 4), "x,V\n");
    EXPECT_EQ(a.csv.find('\r'), std::string::npos);
    EXPECT_NE(a.csv.find("0.10000000000000001"), std::string::npos);
}

TEST(Potential, MorseHandValue)
{
    RunConfig c = sextic_config();
    c.family = Family::Morse;
    c.q = 2;
    c.j = 0;
    c.x_min = -2.0;
    c.x_max = 2.0;
    c.n = 41;
    c.format = "csv";
    const auto r = cmd_potential(c);
    EXPECT_NEAR(csv_value_at(r.csv, 0.0, 1), -0.75, 1e-14);
}

TEST(Potential, ConstantMassCsvIdenticalAcrossOrderings)
{
    RunConfig c = sextic_config();
    c.format = "csv";
    c.mass = "1.3";
    c.n = 201;
    const auto ref = cmd_potential(c).csv;
    for (auto [a, b] : std::vector<std::pair<double, double>>{{-0.5, 0}, {-1, 0.5}, {0.3, -2}, {-1.0 / 3, -1.0 / 3}}) {
        c.alpha = a;
        c.beta = b;
        EXPECT_EQ(cmd_potential(c).csv, ref);
    }
}

TEST(Wavefunction, SelectedState)
{
    RunConfig c = sextic_config();
    c.epsilon_index = 1;
    const auto r = cmd_wavefunction(c);
    EXPECT_TRUE(r.ok);
    EXPECT_EQ(r.report.at("nodes").get<int>(), 1);
    EXPECT_TRUE(r.report.at("normalizable").get<bool>());
    c.epsilon_index = 2;
    EXPECT_THROW(cmd_wavefunction(c), InvalidArgument);
}

TEST(Residual, ReportsBothReadings)
{
    RunConfig c = sextic_config();
    c.mass = "rational2";
    c.alpha = -0.5;
    c.beta = 0;
    const auto r = cmd_residual(c);
    EXPECT_TRUE(r.ok);
    for (const auto& s : r.report.at("states")) {
        EXPECT_LT(s.at("residual").at("reading_a").get<double>(), 1e-8);
        EXPECT_GT(s.at("residual").at("reading_b").get<double>(), 1e-6);
        EXPECT_EQ(s.at("residual").at("consistent_reading").get<std::string>(), "A");
    }
}

TEST(Verify, SexticHalfSpinConstantMass)
{
    const auto r = cmd_verify(sextic_config());
    EXPECT_TRUE(r.ok) << r.report.dump(2);
    for (const auto& s : r.report.at("states")) {
        EXPECT_TRUE(s.at("verified").get<bool>());
        EXPECT_LT(s.at("delta_E").get<double>(), 5e-3);
        EXPECT_TRUE(s.at("nodes_consistent").get<bool>());
    }
}

TEST(Verify, ExactlySolvableRationalMass)
{
    RunConfig c = sextic_config();
    c.mass = "((a + x^2)/(1 + x^2))^2";
    c.mass_params = {{"a", 2.0}};
    c.q = 0;
    c.b = 1;
    const auto r = cmd_verify(c);
    EXPECT_TRUE(r.ok) << r.report.dump(2);
}

TEST(Verify, DebugShiftFails)
{
    RunConfig c = sextic_config();
    c.debug_shift = 0.1;
    const auto r = cmd_verify(c);
    EXPECT_FALSE(r.ok);
    EXPECT_FALSE(r.report.at("verified").get<bool>());
}

TEST(Cli, SpectrumToStdout)
{
    const auto r = run_cli("spectrum --family sextic --ell 0 --b 0 --q 1 --j 0.5");
    ASSERT_EQ(r.status, 0);
    const auto j = json::parse(r.out);
    EXPECT_NEAR(j.at("epsilon_roots")[1].get<double>(), 1.224745, 1e-6);
    EXPECT_EQ(j.at("config").at("family").get<std::string>(), "sextic");
}

TEST(Cli, ExitCodes)
{
    EXPECT_EQ(run_cli("verify --family sextic --ell 0 --b 0 --q 1 --j 0.5").status, 0);
    EXPECT_EQ(run_cli("verify --family sextic --ell 0 --b 0 --q 1 --j 0.5 --debug-shift 0.1").status, 2);
    EXPECT_EQ(run_cli("spectrum --j 0.3").status, 1);
    EXPECT_EQ(run_cli("spectrum --family quartic").status, 1);
    EXPECT_EQ(run_cli("spectrum --bogus 1").status, 1);
    EXPECT_EQ(run_cli("potential --mass \"1 +\"").status, 1);
    EXPECT_EQ(run_cli("").status, 1);
}

TEST(Cli, ConfigPrecedence)
{
    const auto cfg = temp_file("cfg.json");
    std::ofstream(cfg) << R"({"family": "sextic", "q": 1, "j": 1, "ell": 0.5})";
    const auto r = run_cli("spectrum --config " + cfg.string() + " --ell 0");
    ASSERT_EQ(r.status, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j.at("config").at("ell").get<double>(), 0.0);
    EXPECT_EQ(j.at("config").at("j").get<double>(), 1.0);
    EXPECT_EQ(j.at("epsilon_roots").size(), 3u);
    std::ofstream(cfg) << R"({"family": "sextic", "unknown": 1})";
    EXPECT_EQ(run_cli("spectrum --config " + cfg.string()).status, 1);
    EXPECT_EQ(run_cli("spectrum --config /nonexistent/qes.json").status, 1);
    std::filesystem::remove(cfg);
}

TEST(Cli, CsvWithSidecarIsDeterministic)
{
    const auto a = temp_file("a.csv"), b = temp_file("b.csv");
    const std::string args = "potential --family sextic --ell 0 --b 0 --q 1 --j 0.5 --format csv --out ";
    ASSERT_EQ(run_cli(args + a.string()).status, 0);
    ASSERT_EQ(run_cli(args + b.string()).status, 0);
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream is(p);
        return std::string(std::istreambuf_iterator<char>(is), {});
    };
    EXPECT_EQ(slurp(a), slurp(b));
    const auto meta = json::parse(slurp(a.string() + ".json"));
    EXPECT_EQ(meta.at("config").at("n").get<int>(), 2001);
    for (const auto& p : {a, b}) {
        std::filesystem::remove(p);
        std::filesystem::remove(p.string() + ".json");
    }
}

TEST(Verify, WideningExtendsOnlyTruncatedSides)
{
    RunConfig c = sextic_config();
    c.family = Family::Morse;
    c.x_min = -3.0;
    c.x_max = 20.0;
    c.n = 2001;
    const auto ctx = build_context(c);
    const auto right = detail::widened_config(ctx, false, true);
    EXPECT_EQ(*right.x_min, -3.0);
    EXPECT_DOUBLE_EQ(*right.x_max, 31.5);
    EXPECT_EQ(right.n % 2, 1u);
    EXPECT_NEAR((*right.x_max - *right.x_min) / static_cast<double>(right.n - 1), ctx.grid.h(), 1e-12);
    const auto both = detail::widened_config(ctx, true, true);
    EXPECT_DOUBLE_EQ(*both.x_min, -14.5);
    // a radial origin is never moved
    const auto radial = detail::widened_config(build_context(sextic_config()), true, false);
    EXPECT_EQ(*radial.x_min, 1e-3);
    EXPECT_EQ(*radial.x_max, 6.0);
}

TEST(Verify, MorseOnFineGrid)
{
    RunConfig c = sextic_config();
    c.family = Family::Morse;
    c.n = 16001;
    const auto r = cmd_verify(c);
    EXPECT_TRUE(r.ok) << r.report.dump(2);
    EXPECT_TRUE(r.report.at("warnings").empty());
}

TEST(Verify, CoulombOriginBranchPointStaysRed)
{
    // psi ~ u^{3/4} at the radial origin: the oracle converges like h^{1/2}
    // and the five-point residual does not fall below the tolerance.
    RunConfig c = sextic_config();
    c.family = Family::Coulomb;
    c.b = 3;
    const auto r = cmd_verify(c);
    EXPECT_FALSE(r.ok);
    for (const auto& s : r.report.at("states")) {
        EXPECT_DOUBLE_EQ(s.at("energy").get<double>(), 0.0);
        EXPECT_LT(s.at("nearest_oracle").at("delta_E").get<double>(), 0.5);
        EXPECT_EQ(s.at("nodes").get<int>(), s.at("nearest_oracle").at("nodes").get<int>());
    }
}
