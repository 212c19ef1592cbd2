#include "efa/acceptance.hpp"
#include "efa/config.hpp"
#include "efa/csv.hpp"
#include "efa/experiments.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

using namespace efa;
namespace fs = std::filesystem;

namespace
{
std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator< char >(in), {}};
}

fs::path scratch_dir(const std::string& name)
{
    const auto d = fs::temp_directory_path() / ("efa_test_" + name);
    fs::remove_all(d);
    return d;
}

const char* constant_sweep = R"(
[experiment]
kind = upscaling
[coefficient]
name = constant
c = 1.5
[sweep]
epsilons = 1/20, 1/40, 1/80
[upscale]
eta = 0.1
kernels = 3:3, 5:5
points_per_epsilon = 10
)";
} // namespace

TEST(Config, SectionsCommentsAndNumbers)
{
    const auto c = Config::parse_string("top = 1\n# comment\n[a]\nx = 1/8   # trailing\ny=  hello , world \n[b]\nflag = yes\n");
    EXPECT_EQ(c.get_double("top", 0), 1.0);
    EXPECT_EQ(c.get_double("a.x", 0), 0.125);
    EXPECT_EQ(c.get_strings("a.y"), (std::vector< std::string >{"hello", "world"}));
    EXPECT_TRUE(c.get_bool("b.flag", false));
    EXPECT_EQ(c.get_int("b.missing", 7), 7);
    EXPECT_EQ(c.section("a").size(), 2u);
    EXPECT_NO_THROW(c.reject_unused());
}

TEST(Config, Errors)
{
    EXPECT_THROW(Config::parse_string("[a]\nx = 1\nx = 2\n"), ConfigError);
    EXPECT_THROW(Config::parse_string("[a\nx = 1\n"), ConfigError);
    EXPECT_THROW(Config::parse_string("just words\n"), ConfigError);
    EXPECT_THROW(Config::parse_string(" = 3\n"), ConfigError);
    const auto c = Config::parse_string("[a]\nx = abc\nn = 2.5\nz = 1/0\nu = 1\n");
    EXPECT_THROW(c.get_double("a.x", 0), ConfigError);
    EXPECT_THROW(c.get_int("a.n", 0), ConfigError);
    EXPECT_THROW(c.get_double("a.z", 0), ConfigError);
    EXPECT_THROW(c.require_string("a.missing"), ConfigError);
    EXPECT_THROW(c.reject_unused(), ConfigError);
    try
    {
        Config::parse_string("[s]\nok = 1\nbad line\n");
    }
    catch (const ConfigError& e)
    {
        EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos);
    }
    EXPECT_THROW(Config::load("/nonexistent/efa.cfg"), ConfigError);
}

TEST(Experiment, ParseDefaultsAndValidation)
{
    const auto e = parse_experiment(Config::parse_string(constant_sweep));
    EXPECT_EQ(e.kind, ExperimentKind::upscaling);
    EXPECT_EQ(e.tau, e.eta);
    ASSERT_EQ(e.kernels.size(), 2u);
    EXPECT_EQ(e.kernels[1].p, 5);
    EXPECT_NEAR(e.epsilons[2], 1.0 / 80, 1e-15);

    auto bad = [](const std::string& extra) { return parse_experiment(Config::parse_string(std::string(constant_sweep) + extra)); };
    EXPECT_THROW(bad("[macro]\nbogus = 1\n"), ConfigError);
    EXPECT_THROW(bad("[macro]\nbc = absorbing\n"), ConfigError);
    EXPECT_THROW(parse_experiment(Config::parse_string("[experiment]\nkind = upscaling\n[coefficient]\nname = constant\n[sweep]\nepsilons = 0.5\n")), ConfigError);
    EXPECT_THROW(parse_experiment(Config::parse_string("[experiment]\nkind = magic\n")), ConfigError);
    EXPECT_THROW(parse_experiment(Config::parse_string("[experiment]\nkind = solution2d\ndim = 1\n[coefficient]\nname = iso2d\n[sweep]\nepsilons = 0.05\n")), ConfigError);
    EXPECT_THROW(parse_experiment(Config::parse_string("[experiment]\nkind = upscaling\n[coefficient]\nname = constant\n[sweep]\nepsilons = 0.05\n[upscale]\nkernels = 3-3\n")), ConfigError);
}

TEST(Experiment, UnknownCoefficientParameterIsReported)
{
    const auto e = parse_experiment(Config::parse_string(std::string(constant_sweep) + "[check]\nslopes = true\n"));
    auto       f = e;
    f.params["gamma"] = 2.0;
    try
    {
        run_experiment(f);
        FAIL();
    }
    catch (const Error& err)
    {
        EXPECT_NE(std::string(err.what()).find("gamma"), std::string::npos);
    }
}

TEST(Experiment, ConstantCoefficientSweepIsExact)
{
    const auto out = scratch_dir("constant");
    const auto r   = run_experiment(parse_experiment(Config::parse_string(constant_sweep)), {out, 2});
    ASSERT_EQ(r.rows.size(), 6u);
    for (const auto& row : r.rows)
        EXPECT_LE(row.error, 1e-9);
    for (const auto& s : r.slopes)
    {
        EXPECT_FALSE(s.checked);
        EXPECT_FALSE(s.note.empty());
    }
    EXPECT_TRUE(r.pass());
    const auto text = slurp(out / "upscaling_upscaling.csv");
    EXPECT_EQ(text.substr(0, text.find('\n')), "p,q,epsilon,F,F_hat,error");
}

TEST(Experiment, ConstantMediumEfaEqualsHomogenized)
{
    const auto e = parse_experiment(Config::parse_string(R"(
[experiment]
kind = solution1d
[coefficient]
name = constant
c = 0.8
[sweep]
epsilons = 0.05
[upscale]
eta = 0.1
kernels = 3:3
points_per_epsilon = 10
[macro]
L = 1
N = 20
T = 0.3
bc = dirichlet
)"));
    const auto r = run_experiment(e);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_LE(r.rows[0].error, 1e-9);
}

TEST(Experiment, ZeroDataStaysZero2D)
{
    auto e = parse_experiment(Config::parse_string(R"(
[experiment]
kind = solution2d
[coefficient]
name = aniso2d
c = 0.5
ratio = 1.41
[sweep]
epsilons = 0.1
[upscale]
eta = 0.1
kernels = 3:3
points_per_epsilon = 10
[macro]
L = 1
N = 8
T = 0.2
[initial]
g = zero
velocity = 0
)"));
    const auto r = run_experiment(e);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].value, 0.0);
    EXPECT_EQ(r.rows[0].reference, 0.0);
    EXPECT_EQ(r.rows[0].error, 0.0);
}

TEST(Csv, SnapshotFormats)
{
    const auto           d = scratch_dir("csv");
    const MacroGrid< 1 > g1{1.0, 4, BoundaryCondition::dirichlet_zero};
    write_snapshot(d / "a.csv", g1, 0.5, {0.0, 0.1, 0.2, 0.3, 0.0});
    EXPECT_EQ(slurp(d / "a.csv"), "x,u\n0,0\n0.25,0.10000000000000001\n0.5,0.20000000000000001\n0.75,0.29999999999999999\n1,0\n");
    const MacroGrid< 2 > g2{1.0, 2, BoundaryCondition::periodic};
    write_snapshot(d / "b.csv", g2, 0.25, {1.0, 2.0, 3.0, 4.0});
    EXPECT_EQ(slurp(d / "b.csv"), "# t=0.25 nx=2 ny=2\n1,2\n3,4\n");
    EXPECT_THROW(write_snapshot(d / "c.csv", g2, 0.0, {1.0}), PreconditionError);
}

TEST(Experiment, RepeatedRunsAreByteIdentical)
{
    const auto e = load_experiment(std::string(EFA_SOURCE_DIR) + "/configs/quick_solution1d.cfg");
    const auto a = scratch_dir("det_a"), b = scratch_dir("det_b");
    const auto ra = run_experiment(e, {a, 1});
    const auto rb = run_experiment(e, {b, 3});
    ASSERT_FALSE(ra.files.empty());
    ASSERT_EQ(ra.files.size(), rb.files.size());
    for (const auto& f : ra.files)
    {
        const auto rel = fs::relative(f, a);
        EXPECT_EQ(slurp(a / rel), slurp(b / rel)) << rel;
    }
}

TEST(Experiment, ShippedConfigsParse)
{
    int n = 0;
    for (const auto& dir : {"configs", "configs/acceptance"})
        for (const auto& entry : fs::directory_iterator(fs::path(EFA_SOURCE_DIR) / dir))
            if (entry.path().extension() == ".cfg")
            {
                EXPECT_NO_THROW(load_experiment(entry.path().string())) << entry.path();
                ++n;
            }
    EXPECT_GE(n, 10);
}

TEST(Acceptance, ConfigCopiesMatchEmbeddedText)
{
    using namespace acceptance::configs;
    const fs::path dir = fs::path(EFA_SOURCE_DIR) / "configs" / "acceptance";
    EXPECT_EQ(slurp(dir / "upscaling_rate.cfg"), upscaling_rate);
    EXPECT_EQ(slurp(dir / "solution_ap1d.cfg"), solution_almost_periodic);
    EXPECT_EQ(slurp(dir / "dns_locper1d.cfg"), dns_locally_periodic);
    EXPECT_EQ(slurp(dir / "dns_ap1d.cfg"), dns_almost_periodic);
    EXPECT_EQ(slurp(dir / "dns_2d_c0.cfg"), dns_2d("dns_2d_c0", "0"));
    EXPECT_EQ(slurp(dir / "dns_2d_c05.cfg"), dns_2d("dns_2d_c05", "0.5"));
    EXPECT_EQ(slurp(dir / "det_sweep.cfg"), determinism_sweep);
    EXPECT_EQ(slurp(dir / "det_solution.cfg"), determinism_solution);
}

TEST(Acceptance, SuiteListsFourteenCriteria)
{
    const auto c = acceptance::criteria();
    ASSERT_EQ(c.size(), 14u);
    for (std::size_t i = 0; i < c.size(); ++i)
        EXPECT_EQ(c[i].id, static_cast< int >(i + 1));
    acceptance::Options o;
    o.only = {1, 13};
    const auto r = acceptance::run(o);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_TRUE(r[0].pass) << r[0].measured;
    EXPECT_TRUE(r[1].pass) << r[1].measured;
    EXPECT_NE(acceptance::format_line(r[0]).find("[PASS] C01"), std::string::npos);
}
