#include <CLI11.hpp>

#include "dsfl/cli.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

int main(int argc, char** argv) {
    CLI::App app{"DSFL simulator: two-layer semantic federated learning over noisy links"};
    app.require_subcommand(1);

    dsfl::RunOptions run_opt;
    int threads = 0;
    bool serial = false;
    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("config", run_opt.config_path, "config file (key = value lines)")
        ->required();
    run->add_option("--algo", run_opt.algo, "dsfl | dfedavg | qdfedavg | all")
        ->default_val("dsfl");
    run->add_option("--out", run_opt.out_dir, "output directory (default $DSFL_OUT_DIR or ./out)");
    std::uint64_t seed_val = 0;
    auto* seed_flag = run->add_option("--seed", seed_val, "override the config seed");
    run->add_option("--threads", threads, "worker thread count (0 = OpenMP default)");
    run->add_flag("--serial", serial, "use the serial reference path");

    dsfl::GenDataOptions gen_opt;
    auto* gen = app.add_subcommand("gen-data", "write a synthetic PGM dataset");
    gen->add_option("--n", gen_opt.n, "number of images")->default_val(100);
    gen->add_option("--size", gen_opt.size, "image side length")->default_val(16);
    gen->add_option("--seed", gen_opt.seed, "generator seed")->default_val(0);
    gen->add_option("--out", gen_opt.out_dir, "output directory");

    std::string report_dir;
    auto* rep = app.add_subcommand("report", "summarize run CSVs");
    rep->add_option("--in", report_dir, "directory holding <algo>.csv files")->required();

    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    if (run->parsed()) {
        if (seed_flag->count() > 0) run_opt.seed_override = seed_val;
        run_opt.policy = serial ? dsfl::ExecPolicy::kSerial : dsfl::ExecPolicy::kParallel;
        return dsfl::cmd_run(run_opt);
    }
    if (gen->parsed()) return dsfl::cmd_gen_data(gen_opt);
    if (rep->parsed()) return dsfl::cmd_report(report_dir);
    return 0;
}
