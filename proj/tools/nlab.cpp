// Command-line front end: nlab <verify|ms-limit|decompose|avr|tail-table> --config PATH ...

#include <iostream>

#include <CLI11.hpp>

#include "nlab/commands.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Nonlocal energy laboratory"};
    app.require_subcommand(1);

    nlab::CommandOptions opts;
    std::uint64_t seed = 0;
    std::uint64_t samples = 0;
    std::string out;

    const char* names[][2] = {
        {"verify", "Run the profile, family, volume and tail-mass validators"},
        {"ms-limit", "Run the energy ladder, extrapolate and compare with the predicted limit"},
        {"decompose", "Split energies into the near, far-separated and comparable regions"},
        {"avr", "Estimate the asymptotic volume ratio and density"},
        {"tail-table", "Tabulate mollifier tail masses over (R, n)"},
    };
    for (auto& [name, help] : names) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opts.config_path, "Experiment config (JSON)")->required();
        sub->add_option("--seed", seed, "Monte Carlo seed (overrides the config)");
        sub->add_option("--samples", samples, "Monte Carlo samples per ladder level");
        sub->add_option("--workers", opts.workers, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out", out, "Output directory");
        sub->add_flag("--skip-validate", opts.skip_validate, "Run ms-limit without the validator chain");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : nlab::kExitUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--samples")) opts.samples = samples;
    if (sub->count("--out")) opts.out_dir = out;
    return nlab::run_command(sub->get_name(), opts, std::cout, std::cerr);
}
