// Command-line driver: run a configured evolution, sweep one parameter over a
// list of values, or analyze recorded run directories.

#include <string>
#include <vector>

#include <CLI11.hpp>

#include "alphapatch/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Contour-dynamics laboratory for generalized vortex patches"};
    app.require_subcommand(1);

    std::string config_file;
    std::string output_dir;
    std::string param_path;
    std::vector<std::string> values;
    std::vector<std::string> run_dirs;

    CLI::App* run = app.add_subcommand("run", "Evolve the patches described by a config file");
    run->add_option("-c,--config", config_file, "JSON configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("-o,--output-dir", output_dir,
                    "Output directory (overrides the config's output_dir)");

    CLI::App* sweep =
        app.add_subcommand("sweep", "Run the config once per value of one parameter");
    sweep->add_option("-c,--config", config_file, "JSON configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sweep->add_option("-p,--param", param_path,
                      "Parameter path, e.g. control.dt_init or patches[0].theta_in")
        ->required();
    sweep->add_option("-v,--values", values, "One JSON literal per value")->required();
    sweep->add_option("-o,--output-dir", output_dir,
                      "Sweep directory (overrides the config's output_dir)");

    CLI::App* analyze =
        app.add_subcommand("analyze", "Calibrate the growth envelope for recorded runs");
    analyze->add_option("dirs", run_dirs, "Run directories containing series.ndjson")
        ->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return alphapatch::cmd_run(config_file, output_dir);
    if (sweep->parsed()) return alphapatch::cmd_sweep(config_file, param_path, values, output_dir);
    return alphapatch::cmd_analyze(run_dirs);
}
