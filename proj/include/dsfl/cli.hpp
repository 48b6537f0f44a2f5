#pragma once

#include <optional>
#include <string>

#include "dsfl/federation.hpp"

namespace dsfl {

// CSV column order is fixed; reals print as shortest round-trip decimals
// and infinite PSNR prints as "inf".
extern const char* kCsvHeader;

std::string records_to_csv(const std::vector<RoundRecord>& records);

struct RunOptions {
    std::string config_path;
    std::string algo = "dsfl";  // dsfl | dfedavg | qdfedavg | all
    std::string out_dir;        // empty: $DSFL_OUT_DIR, else "./out"
    std::optional<std::uint64_t> seed_override;
    ExecPolicy policy = ExecPolicy::kParallel;
};

// Exit codes: 0 ok, 2 invalid config (violations on stderr), 1 runtime
// failure (reported with the failing round where known).
int cmd_run(const RunOptions& opt);

struct GenDataOptions {
    int n = 100;
    int size = 16;
    std::uint64_t seed = 0;
    std::string out_dir;
};

// Writes img_<idx>_<label>.pgm files plus labels.csv.
int cmd_gen_data(const GenDataOptions& opt);

// Prints a per-algo summary table from the CSVs in `in_dir` and flags
// whether the expected energy ordering (dsfl < qdfedavg < dfedavg) holds.
int cmd_report(const std::string& in_dir);

}  // namespace dsfl
