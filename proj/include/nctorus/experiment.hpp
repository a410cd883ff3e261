#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nctorus/bounds.hpp"

namespace nct {

// One Fourier coefficient of a grid block: F(m, n) = re + i*im.
struct FourierEntry {
    int m = 0;
    int n = 0;
    double re = 0.0;
    double im = 0.0;
};

// Coefficient-grid specification. kind selects which fields matter:
//   "identity"                    — the flat grid;
//   "scalar"                      — value * identity blocks;
//   "random"                      — seeded invertible Hermitian grid (band,
//                                   magnitude);
//   "blocks"                      — explicit Fourier tables, row-major d*d.
struct HSpec {
    std::string kind = "identity";
    double value = 1.0;
    int band = 1;
    double magnitude = 0.25;
    std::vector<std::vector<FourierEntry>> blocks;
};

struct ScheduleConfig {
    std::string kind = "additive";  // or "dilation"
    int length = 8;
    double decay = 0.5;
    double magnitude = 0.25;  // norm of the additive direction blocks
    int band = 1;             // Fourier band of the direction blocks
};

struct ExperimentConfig {
    std::string mode = "axioms";  // axioms|bound|mk|sandwich|converge|check-all
    int q = 3;
    int p = 1;
    int d = 2;
    std::uint64_t seed = 0;
    int restarts = 64;    // mk solver restarts
    int iterations = 200; // mk solver iterations
    int samples = 20;     // sampled tuples per suite / per row
    int workers = 1;
    int grid = 400;       // sphere-scan resolution for the q = 2 oracle
    std::string out = "out";
    HSpec h;
    HSpec hprime;
    ScheduleConfig schedule;
};

// Strict JSON parsing: unknown keys rejected, every field validated with a
// field-level message (config_error).
ExperimentConfig parse_config(const std::string& json_text);

// Canonical form: fixed key order, explicit defaults, shortest exact number
// rendering. parse(serialize(parse(x))) == parse(x).
std::string serialize_config(const ExperimentConfig& cfg);

CoefficientMatrix build_coefficients(const TorusPtr& t, int d, const HSpec& spec,
                                     std::uint64_t master_seed,
                                     std::uint64_t tag);

enum class RunStatus : int {
    ok = 0,
    violation = 3,
};

struct RunResult {
    RunStatus status = RunStatus::ok;
    std::vector<std::string> artifacts;  // file names inside out_dir
    std::string summary;
};

// Runs the configured mode, writing results*.csv and manifest.json into
// out_dir (created if missing). Deterministic CSV bytes for a fixed config
// across runs and worker counts; timings live in the manifest only.
RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

// Indexed parallel map over 0..n-1 with a bounded worker pool. Tasks must
// not share mutable state; results keyed by index are deterministic for any
// worker count. The first task exception is rethrown after joining.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

} // namespace nct
