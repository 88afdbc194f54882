#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "prwlab/config.hpp"
#include "prwlab/error.hpp"
#include "prwlab/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw prwlab::Error(prwlab::ErrorKind::io, "cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Renewal tables, tree simulation and asymptotic checks for iterated perturbed random walks"};
    app.set_version_flag("--version", std::string(PRWLAB_VERSION));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::vector<std::string> dumps;

    for (const char* name : {"tables", "simulate", "gamma", "verify", "clt"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment file (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
        sub->add_option("--seed", seed, "master seed (overrides simulate.master_seed)");
        sub->add_option("--dump", dumps, "grid function to write as <name>.csv: F, G, U, V or V_<j>");
    }

    CLI11_PARSE(app, argc, argv);

    const std::string cmd_name = app.get_subcommands().front()->get_name();
    auto* sub = app.get_subcommand(cmd_name);
    try {
        const prwlab::ExperimentConfig config = prwlab::parse_config(read_file(config_path));
        prwlab::RunOptions opts;
        if (sub->count("--out")) opts.out_dir = out_dir;
        if (sub->count("--seed")) opts.seed = seed;
        opts.dumps = dumps;
        const prwlab::RunReport rep = prwlab::run(config, prwlab::parse_subcommand(cmd_name), opts);
        for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
        if (!rep.stdout_text.empty()) {
            std::cout << rep.stdout_text;
        } else {
            for (const auto& f : rep.files) std::cout << rep.out_dir << '/' << f << '\n';
        }
    } catch (const prwlab::Error& e) {
        std::cerr << prwlab::error_json(prwlab::to_string(e.kind()), e.what()) << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << prwlab::error_json("internal", e.what()) << '\n';
        return 3;
    }
    return 0;
}
