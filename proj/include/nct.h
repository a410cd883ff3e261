#pragma once

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every fallible call. */
#define NCT_OK 0
#define NCT_ERR_PARAM 1     /* invalid argument or dimension mismatch */
#define NCT_ERR_CONFIG 2    /* configuration parse or validation error */
#define NCT_ERR_VIOLATION 3 /* a numeric contract check failed */
#define NCT_ERR_RUNTIME 4   /* runtime failure (singular pivot, io, ...) */

/* Library version string, static storage. */
const char* nct_version(void);

/* Message of the last error on this thread ("" if none). The pointer stays
 * valid until the next failing call on the same thread. */
const char* nct_last_error(void);

/* Opaque handles. Every *_new/_create function stores a fresh handle through
 * its out parameter on NCT_OK; release with the matching *_free. */
typedef struct nct_torus nct_torus;
typedef struct nct_element nct_element;
typedef struct nct_lip nct_lip;
typedef struct nct_state nct_state;

/* Fuzzy torus presentation at angle p/q (coprime, 2 <= q <= 8). */
int nct_torus_new(int q, int p, nct_torus** out);
void nct_torus_free(nct_torus* t);
int nct_torus_q(const nct_torus* t);

/* Weyl monomial shift^m clock^n. */
int nct_element_weyl(const nct_torus* t, int m, int n, nct_element** out);
/* Seeded self-adjoint element with Fourier support in the given band. */
int nct_element_random_hermitian(const nct_torus* t, uint64_t seed, int band,
                                 nct_element** out);
int nct_element_op_norm(const nct_element* e, double* out);
void nct_element_free(nct_element* e);

/* Seminorm from the flat first-order operator (standard derivation pair). */
int nct_lip_flat(const nct_torus* t, nct_lip** out);
/* Same seminorm multiplied by c > 0. */
int nct_lip_scaled(const nct_lip* l, double c, nct_lip** out);
int nct_lip_eval(const nct_lip* l, const nct_element* a, double* out);
/* Smallest seminorm value on the unit sphere of the traceless part;
 * positive iff the kernel is exactly the scalars. */
int nct_lip_kernel_gap(const nct_lip* l, double* out);
void nct_lip_free(nct_lip* l);

/* Seeded full-rank density state on q x q matrices. */
int nct_state_random(int q, uint64_t seed, nct_state** out);
void nct_state_free(nct_state* s);

/* Monge-Kantorovich distance between two states under the seminorm,
 * via multi-start supergradient ascent. */
int nct_mk_distance(const nct_lip* l, const nct_state* phi,
                    const nct_state* psi, int restarts, int iterations,
                    uint64_t seed, double* out);

/* Metric diameter estimate of the state space under the seminorm. */
int nct_diameter(const nct_lip* l, uint64_t seed, double* out);

/* Parse a JSON experiment configuration, run it, and write results*.csv and
 * manifest.json into out_dir (defaults to the config's "out" field when
 * NULL). On NCT_OK or NCT_ERR_VIOLATION a one-line run summary is copied
 * into summary (truncated to summary_cap, always NUL-terminated) when
 * summary is non-NULL. */
int nct_run_config_json(const char* json_text, const char* out_dir,
                        char* summary, size_t summary_cap);

#ifdef __cplusplus
}
#endif
