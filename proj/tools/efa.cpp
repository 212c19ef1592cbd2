#include "efa/efa.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace
{
enum Exit
{
    ok           = 0,
    check_failed = 1,
    bad_config   = 2,
    failure      = 3
};

void print_report(const efa::ErrorReport& r)
{
    for (const auto& s : r.slopes)
    {
        std::cout << r.experiment << " p=" << s.p << " q=" << s.q << " slope=";
        if (s.note.empty())
            std::cout << efa::acceptance::fmt("%.3f", s.slope) << " band=[" << s.lower << ", " << s.upper << "]" << (s.checked ? (s.pass ? " PASS" : " FAIL") : " (unchecked)");
        else
            std::cout << "- (" << s.note << ")";
        std::cout << "\n";
    }
    if (r.dns_distance)
        std::cout << r.experiment << " dns_distance=" << efa::acceptance::fmt("%.4f", *r.dns_distance) << (r.dns_pass ? " PASS" : " FAIL") << "\n";
}

int run_config(const std::string& path, bool sweep, const std::string& out, int workers, bool quiet)
{
    auto e = efa::load_experiment(path);
    if (sweep && e.epsilons.size() < 3)
        throw efa::ConfigError("sweep needs at least 3 values in sweep.epsilons");
    const auto r = efa::run_experiment(e, efa::RunOptions{out, workers});
    efa::write_summary(std::filesystem::path(out) / "summary.csv", {r});
    if (!quiet)
        print_report(r);
    return r.pass() ? ok : check_failed;
}

int run_check(const std::string& out, int workers, bool quiet)
{
    efa::acceptance::Options opt{out, workers, {}};
    const auto               results = efa::acceptance::run(opt, [&](const efa::acceptance::Result& r) {
        if (!quiet)
            std::cout << efa::acceptance::format_line(r) << std::endl;
    });
    std::size_t passed = 0;
    for (const auto& r : results)
        passed += r.pass ? 1 : 0;
    if (!quiet)
        std::cout << passed << "/" << results.size() << " criteria passed\n";
    return passed == results.size() ? ok : check_failed;
}
} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Equation-free multiscale solver for non-divergence wave equations"};
    app.require_subcommand(1);
    std::string out     = "out";
    int         workers = efa::default_workers();
    bool        quiet   = false;
    app.add_option("--out", out, "output directory")->capture_default_str();
    app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_flag("--quiet", quiet, "suppress progress output");

    std::string config;
    auto*       run   = app.add_subcommand("run", "run one experiment");
    auto*       sweep = app.add_subcommand("sweep", "run an epsilon sweep and fit convergence slopes");
    auto*       check = app.add_subcommand("check", "run the acceptance suite");
    for (auto* sc : {run, sweep})
        sc->add_option("config", config, "experiment configuration file")->required()->check(CLI::ExistingFile);
    (void)check;
    app.fallthrough();

    CLI11_PARSE(app, argc, argv);
    try
    {
        if (*check)
            return run_check(out, workers, quiet);
        return run_config(config, sweep->parsed(), out, workers, quiet);
    }
    catch (const efa::ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return bad_config;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return failure;
    }
}
