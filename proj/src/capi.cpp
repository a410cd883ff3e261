#include "nct.h"

#include <cstring>
#include <exception>
#include <string>
#include <utility>

#include "nctorus/errors.hpp"
#include "nctorus/experiment.hpp"
#include "nctorus/metric.hpp"
#include "nctorus/rng.hpp"
#include "nctorus/torus.hpp"
#include "nctorus/version.hpp"

struct nct_torus {
    nct::TorusPtr t;
};
struct nct_element {
    nct::AlgebraElement a;
};
struct nct_lip {
    nct::LipSeminorm l;
};
struct nct_state {
    nct::State s;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const char* what) {
    g_last_error = what;
    return code;
}

template <class Fn>
int guard(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return NCT_OK;
    } catch (const nct::config_error& e) {
        return fail(NCT_ERR_CONFIG, e.what());
    } catch (const nct::parameter_error& e) {
        return fail(NCT_ERR_PARAM, e.what());
    } catch (const nct::dimension_error& e) {
        return fail(NCT_ERR_PARAM, e.what());
    } catch (const nct::error& e) {
        return fail(NCT_ERR_RUNTIME, e.what());
    } catch (const std::exception& e) {
        return fail(NCT_ERR_RUNTIME, e.what());
    }
}

int require(bool ok, const char* what) {
    return ok ? NCT_OK : fail(NCT_ERR_PARAM, what);
}

void copy_out(char* dst, size_t cap, const std::string& src) {
    if (!dst || cap == 0) return;
    const size_t n = src.size() < cap - 1 ? src.size() : cap - 1;
    std::memcpy(dst, src.data(), n);
    dst[n] = '\0';
}

}  // namespace

extern "C" {

const char* nct_version(void) { return nct::kVersion; }

const char* nct_last_error(void) { return g_last_error.c_str(); }

int nct_torus_new(int q, int p, nct_torus** out) {
    if (int rc = require(out != nullptr, "nct_torus_new: null out")) return rc;
    return guard([&] { *out = new nct_torus{nct::make_torus(q, p)}; });
}

void nct_torus_free(nct_torus* t) { delete t; }

int nct_torus_q(const nct_torus* t) { return t ? t->t->q() : 0; }

int nct_element_weyl(const nct_torus* t, int m, int n, nct_element** out) {
    if (int rc = require(t && out, "nct_element_weyl: null argument"))
        return rc;
    return guard([&] {
        *out = new nct_element{nct::AlgebraElement::weyl(t->t, m, n)};
    });
}

int nct_element_random_hermitian(const nct_torus* t, uint64_t seed, int band,
                                 nct_element** out) {
    if (int rc = require(t && out,
                         "nct_element_random_hermitian: null argument"))
        return rc;
    return guard([&] {
        nct::Rng rng(seed);
        *out = new nct_element{
            nct::AlgebraElement::random_hermitian(t->t, rng, band)};
    });
}

int nct_element_op_norm(const nct_element* e, double* out) {
    if (int rc = require(e && out, "nct_element_op_norm: null argument"))
        return rc;
    return guard([&] { *out = e->a.op_norm(); });
}

void nct_element_free(nct_element* e) { delete e; }

int nct_lip_flat(const nct_torus* t, nct_lip** out) {
    if (int rc = require(t && out, "nct_lip_flat: null argument")) return rc;
    return guard([&] { *out = new nct_lip{nct::LipSeminorm::flat(t->t)}; });
}

int nct_lip_scaled(const nct_lip* l, double c, nct_lip** out) {
    if (int rc = require(l && out, "nct_lip_scaled: null argument")) return rc;
    return guard([&] { *out = new nct_lip{l->l.scaled(c)}; });
}

int nct_lip_eval(const nct_lip* l, const nct_element* a, double* out) {
    if (int rc = require(l && a && out, "nct_lip_eval: null argument"))
        return rc;
    return guard([&] { *out = l->l.eval(a->a); });
}

int nct_lip_kernel_gap(const nct_lip* l, double* out) {
    if (int rc = require(l && out, "nct_lip_kernel_gap: null argument"))
        return rc;
    return guard([&] { *out = l->l.kernel_gap(); });
}

void nct_lip_free(nct_lip* l) { delete l; }

int nct_state_random(int q, uint64_t seed, nct_state** out) {
    if (int rc = require(out != nullptr, "nct_state_random: null out"))
        return rc;
    return guard([&] {
        nct::Rng rng(seed);
        *out = new nct_state{nct::State::random_mixed(q, rng)};
    });
}

void nct_state_free(nct_state* s) { delete s; }

int nct_mk_distance(const nct_lip* l, const nct_state* phi,
                    const nct_state* psi, int restarts, int iterations,
                    uint64_t seed, double* out) {
    if (int rc = require(l && phi && psi && out,
                         "nct_mk_distance: null argument"))
        return rc;
    return guard([&] {
        nct::MkBudget budget;
        budget.restarts = restarts;
        budget.iterations = iterations;
        budget.seed = seed;
        *out = nct::mk_distance(l->l, phi->s, psi->s, budget).value;
    });
}

int nct_diameter(const nct_lip* l, uint64_t seed, double* out) {
    if (int rc = require(l && out, "nct_diameter: null argument")) return rc;
    return guard([&] {
        nct::DiamBudget budget;
        budget.seed = seed;
        *out = nct::diameter(l->l, budget).value;
    });
}

int nct_run_config_json(const char* json_text, const char* out_dir,
                        char* summary, size_t summary_cap) {
    if (int rc = require(json_text != nullptr,
                         "nct_run_config_json: null config"))
        return rc;
    nct::RunResult result;
    const int rc = guard([&] {
        const nct::ExperimentConfig cfg = nct::parse_config(json_text);
        const std::string dir = out_dir ? out_dir : cfg.out;
        result = nct::run_experiment(cfg, dir);
    });
    if (rc != NCT_OK) return rc;
    copy_out(summary, summary_cap, result.summary);
    if (result.status == nct::RunStatus::violation)
        return fail(NCT_ERR_VIOLATION, result.summary.c_str());
    return NCT_OK;
}

}  // extern "C"
