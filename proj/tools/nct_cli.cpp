#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nct.h"

namespace {

using nlohmann::ordered_json;

struct Overrides {
    std::string config_path;
    std::string out;
    int q = 0, p = 0, d = 0;
    std::uint64_t seed = 0;
    int restarts = 0, iterations = 0, samples = 0, workers = 0, grid = 0;
    bool quiet = false;
};

struct ModeCmd {
    CLI::App* sub = nullptr;
    Overrides opts;
    CLI::Option* o_q = nullptr;
    CLI::Option* o_p = nullptr;
    CLI::Option* o_d = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_restarts = nullptr;
    CLI::Option* o_iterations = nullptr;
    CLI::Option* o_samples = nullptr;
    CLI::Option* o_workers = nullptr;
    CLI::Option* o_grid = nullptr;
    CLI::Option* o_out = nullptr;
};

void add_common(ModeCmd& m) {
    auto& o = m.opts;
    m.sub->add_option("--config", o.config_path,
                      "JSON configuration file (flags override its fields)");
    m.o_q = m.sub->add_option("--q", o.q, "matrix size q (2..8)");
    m.o_p = m.sub->add_option("--p", o.p, "angle numerator p, coprime to q");
    m.o_d = m.sub->add_option("--d", o.d, "derivation count (1 or 2)");
    m.o_seed = m.sub->add_option("--seed", o.seed, "master seed");
    m.o_restarts =
        m.sub->add_option("--restarts", o.restarts, "solver restarts");
    m.o_iterations =
        m.sub->add_option("--iterations", o.iterations, "solver iterations");
    m.o_samples = m.sub->add_option("--samples", o.samples,
                                    "sampled tuples per suite or row");
    m.o_workers = m.sub->add_option("--workers", o.workers, "worker threads");
    m.o_grid = m.sub->add_option("--grid", o.grid,
                                 "sphere-scan resolution for the q=2 oracle");
    m.o_out = m.sub->add_option("--out", o.out, "output directory");
    m.sub->add_flag("--quiet", o.quiet, "suppress the summary line");
}

int run_mode(const std::string& mode, const ModeCmd& m) {
    ordered_json cfg = ordered_json::object();
    if (!m.opts.config_path.empty()) {
        std::ifstream f(m.opts.config_path);
        if (!f) {
            std::fprintf(stderr, "error: cannot read %s\n",
                         m.opts.config_path.c_str());
            return NCT_ERR_CONFIG;
        }
        std::stringstream ss;
        ss << f.rdbuf();
        try {
            cfg = ordered_json::parse(ss.str());
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s: %s\n", m.opts.config_path.c_str(),
                         e.what());
            return NCT_ERR_CONFIG;
        }
        if (!cfg.is_object()) {
            std::fprintf(stderr, "error: %s: top level must be an object\n",
                         m.opts.config_path.c_str());
            return NCT_ERR_CONFIG;
        }
    }
    cfg["mode"] = mode;
    if (m.o_q->count()) cfg["q"] = m.opts.q;
    if (m.o_p->count()) cfg["p"] = m.opts.p;
    if (m.o_d->count()) cfg["d"] = m.opts.d;
    if (m.o_seed->count()) cfg["seed"] = m.opts.seed;
    if (m.o_restarts->count()) cfg["restarts"] = m.opts.restarts;
    if (m.o_iterations->count()) cfg["iterations"] = m.opts.iterations;
    if (m.o_samples->count()) cfg["samples"] = m.opts.samples;
    if (m.o_workers->count()) cfg["workers"] = m.opts.workers;
    if (m.o_grid->count()) cfg["grid"] = m.opts.grid;
    if (m.o_out->count()) cfg["out"] = m.opts.out;

    const std::string text = cfg.dump();
    char summary[1024] = {0};
    const int rc =
        nct_run_config_json(text.c_str(), nullptr, summary, sizeof summary);
    if (rc == NCT_OK || rc == NCT_ERR_VIOLATION) {
        if (!m.opts.quiet) {
            const std::string out_dir =
                cfg.contains("out") ? cfg["out"].get<std::string>() : "out";
            std::printf("%s\n", summary);
            std::printf("artifacts: %s\n", out_dir.c_str());
        }
        if (rc == NCT_ERR_VIOLATION)
            std::fprintf(stderr, "error: numeric contract violation\n");
        return rc;
    }
    std::fprintf(stderr, "error: %s\n", nct_last_error());
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"curvature experiments on fuzzy torus metric geometry"};
    app.set_version_flag("--version", nct_version());
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> modes = {
        {"axioms", "run the algebra/operator/metric invariant suites"},
        {"bound", "closed-form distance bound for one coefficient pair"},
        {"mk", "sampled state distances with scaling and q=2 oracle checks"},
        {"sandwich", "pivot comparison inequality on sampled data"},
        {"converge", "distance bound along a shrinking deformation schedule"},
        {"check-all", "all of the above into one artifact directory"},
    };
    std::vector<ModeCmd> cmds(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) {
        cmds[i].sub = app.add_subcommand(modes[i].first, modes[i].second);
        add_common(cmds[i]);
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < modes.size(); ++i)
        if (cmds[i].sub->parsed()) return run_mode(modes[i].first, cmds[i]);
    return NCT_ERR_PARAM;
}
