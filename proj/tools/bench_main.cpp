// Times the serial reference path against the OpenMP path on one short
// experiment and checks that both produce identical records.

#include <chrono>
#include <cstdio>
#include <cstring>

#include "dsfl/cli.hpp"
#include "dsfl/federation.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double run_timed(const dsfl::SimConfig& cfg, dsfl::ExecPolicy policy,
                 dsfl::RunResult& out) {
    auto t0 = std::chrono::steady_clock::now();
    out = dsfl::run_experiment(cfg, dsfl::Algo::kDsfl, policy);
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    dsfl::SimConfig cfg;
    cfg.rounds = 5;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--rounds") == 0 && i + 1 < argc) cfg.rounds = std::atoi(argv[++i]);
        if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) cfg.seed = std::atoll(argv[++i]);
    }

#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both paths are serial\n");
#endif

    dsfl::RunResult serial, parallel;
    double t_serial = run_timed(cfg, dsfl::ExecPolicy::kSerial, serial);
    double t_parallel = run_timed(cfg, dsfl::ExecPolicy::kParallel, parallel);

    std::printf("serial:   %.3f s for %d rounds\n", t_serial, cfg.rounds);
    std::printf("parallel: %.3f s for %d rounds\n", t_parallel, cfg.rounds);
    std::printf("speedup:  %.2fx\n", t_parallel > 0 ? t_serial / t_parallel : 0.0);

    std::string a = dsfl::records_to_csv(serial.records);
    std::string b = dsfl::records_to_csv(parallel.records);
    if (a != b) {
        std::printf("MISMATCH: serial and parallel records differ\n");
        return 1;
    }
    std::printf("records identical across execution policies\n");
    return 0;
}
