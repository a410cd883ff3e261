#include "nctorus/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nctorus/clifford.hpp"
#include "nctorus/dirac.hpp"
#include "nctorus/errors.hpp"
#include "nctorus/gns.hpp"
#include "nctorus/linalg.hpp"
#include "nctorus/metric.hpp"
#include "nctorus/rng.hpp"
#include "nctorus/version.hpp"

namespace nct {

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    if (!fn) throw parameter_error("parallel_for: missing body");
    if (workers < 1) throw parameter_error("parallel_for: workers must be >= 1");
    const int pool_size = std::min(workers, n);
    if (pool_size == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex err_mu;
    std::exception_ptr first_error;
    auto body = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(err_mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(pool_size));
    for (int w = 0; w < pool_size; ++w) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using SteadyClock = std::chrono::steady_clock;

double ms_since(SteadyClock::time_point t0) {
    return std::chrono::duration<double, std::milli>(SteadyClock::now() - t0)
        .count();
}

std::string fmt_g12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
}

std::string fmt_exact(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------- CSV

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out;
    out.reserve(field.size() + 2);
    out += '"';
    for (const char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_line(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) line += ',';
        line += csv_quote(fields[i]);
    }
    line += '\n';
    return line;
}

// ---------------------------------------------------------------- config

[[noreturn]] void bad(const std::string& msg) { throw config_error(msg); }

const char* const kTopKeys[] = {"mode",    "q",       "p",     "d",
                                "seed",    "restarts", "iterations",
                                "samples", "workers", "grid",  "out",
                                "h",       "hprime",  "schedule"};
const char* const kModes[] = {"axioms", "bound",    "mk",
                              "sandwich", "converge", "check-all"};
const char* const kScheduleKeys[] = {"kind", "length", "decay", "magnitude",
                                     "band"};

template <std::size_t N>
bool known_key(const char* const (&keys)[N], const std::string& k) {
    for (const char* key : keys)
        if (k == key) return true;
    return false;
}

double parse_real(const std::string& s, const std::string& where) {
    double out = 0.0;
    const char* last = s.data() + s.size();
    const auto res = std::from_chars(s.data(), last, out);
    if (res.ec != std::errc() || res.ptr != last)
        bad(where + ": cannot parse number '" + s + "'");
    return out;
}

int parse_int_str(const std::string& s, const std::string& where) {
    int out = 0;
    const char* last = s.data() + s.size();
    const auto res = std::from_chars(s.data(), last, out);
    if (res.ec != std::errc() || res.ptr != last)
        bad(where + ": cannot parse integer '" + s + "'");
    return out;
}

int get_int(const ordered_json& obj, const char* key, int fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer())
        bad(std::string("config.") + key + ": expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < -2147483647LL || x > 2147483647LL)
        bad(std::string("config.") + key + ": out of range");
    return static_cast<int>(x);
}

std::uint64_t get_u64(const ordered_json& obj, const char* key,
                      std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
        const auto x = v.get<std::int64_t>();
        if (x < 0) bad(std::string("config.") + key + ": must be nonnegative");
        return static_cast<std::uint64_t>(x);
    }
    bad(std::string("config.") + key + ": expected an integer");
}

double get_real(const ordered_json& obj, const char* key, double fallback,
                const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) bad(where + "." + key + ": expected a number");
    return v.get<double>();
}

std::string get_string(const ordered_json& obj, const char* key,
                       const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_string())
        bad(std::string("config.") + key + ": expected a string");
    return v.get<std::string>();
}

void parse_random_args(const std::string& body, HSpec& s,
                       const std::string& where) {
    bool saw_band = false;
    bool saw_mag = false;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = body.find(',', pos);
        const std::string part = body.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        const std::size_t eq = part.find('=');
        if (eq == std::string::npos)
            bad(where + ": expected key=value, got '" + part + "'");
        const std::string key = part.substr(0, eq);
        const std::string val = part.substr(eq + 1);
        if (key == "band") {
            if (saw_band) bad(where + ": duplicate 'band'");
            s.band = parse_int_str(val, where + ".band");
            saw_band = true;
        } else if (key == "mag") {
            if (saw_mag) bad(where + ": duplicate 'mag'");
            s.magnitude = parse_real(val, where + ".mag");
            saw_mag = true;
        } else {
            bad(where + ": unknown option '" + key + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
}

HSpec parse_hspec(const ordered_json& v, const std::string& where) {
    HSpec s;
    if (v.is_string()) {
        const std::string str = v.get<std::string>();
        if (str == "identity") return s;
        if (str.rfind("scalar:", 0) == 0) {
            s.kind = "scalar";
            s.value = parse_real(str.substr(7), where);
            return s;
        }
        if (str == "random") {
            s.kind = "random";
            return s;
        }
        if (str.rfind("random:", 0) == 0) {
            s.kind = "random";
            parse_random_args(str.substr(7), s, where);
            return s;
        }
        bad(where + ": unrecognized coefficient spec '" + str + "'");
    }
    if (v.is_object()) {
        for (auto it = v.begin(); it != v.end(); ++it)
            if (it.key() != "blocks")
                bad(where + ": unknown key '" + it.key() + "'");
        if (!v.contains("blocks"))
            bad(where + ": object form needs a 'blocks' array");
        const auto& rows = v.at("blocks");
        if (!rows.is_array() || rows.empty())
            bad(where + ".blocks: expected a nonempty array");
        s.kind = "blocks";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& blk = rows[i];
            const std::string tag = where + ".blocks[" + std::to_string(i) + "]";
            if (!blk.is_array()) bad(tag + ": expected an array of entries");
            std::vector<FourierEntry> entries;
            for (const auto& e : blk) {
                if (!e.is_array() || e.size() != 4)
                    bad(tag + ": each entry is [m,n,re,im]");
                if (!e[0].is_number_integer() || !e[1].is_number_integer())
                    bad(tag + ": m and n must be integers");
                if (!e[2].is_number() || !e[3].is_number())
                    bad(tag + ": re and im must be numbers");
                entries.push_back({e[0].get<int>(), e[1].get<int>(),
                                   e[2].get<double>(), e[3].get<double>()});
            }
            s.blocks.push_back(std::move(entries));
        }
        return s;
    }
    bad(where + ": must be a string or an object with 'blocks'");
}

void validate_hspec(const HSpec& s, int q, int d, const std::string& where) {
    if (s.kind == "identity") return;
    if (s.kind == "scalar") {
        if (!std::isfinite(s.value) || s.value == 0.0)
            bad(where + ": scalar coefficient must be finite and nonzero");
        return;
    }
    if (s.kind == "random") {
        if (s.band < 0 || s.band > q) bad(where + ": band must lie in 0..q");
        if (!std::isfinite(s.magnitude) || s.magnitude < 0.0)
            bad(where + ": magnitude must be finite and nonnegative");
        if (s.magnitude * d >= 1.0)
            bad(where +
                ": d * magnitude must stay below 1 to keep the grid invertible");
        return;
    }
    if (s.kind == "blocks") {
        if (static_cast<int>(s.blocks.size()) != d * d)
            bad(where + ": blocks must list d*d Fourier tables row-major");
        for (const auto& blk : s.blocks)
            for (const auto& e : blk) {
                if (e.m < 0 || e.m >= q || e.n < 0 || e.n >= q)
                    bad(where + ": Fourier index out of range for q");
                if (!std::isfinite(e.re) || !std::isfinite(e.im))
                    bad(where + ": coefficients must be finite");
            }
        return;
    }
    bad(where + ": unknown coefficient kind '" + s.kind + "'");
}

void validate_config(const ExperimentConfig& c) {
    if (!known_key(kModes, c.mode)) bad("config.mode: unknown mode '" + c.mode + "'");
    if (c.q < 2 || c.q > 8) bad("config.q: supported sizes are 2..8");
    if (c.p < 1 || c.p >= c.q) bad("config.p: p must lie in 1..q-1");
    if (std::gcd(c.p, c.q) != 1) bad("config.p: p and q must be coprime");
    if (c.d < 1 || c.d > 2) bad("config.d: supported derivation counts are 1 and 2");
    if (c.restarts < 1 || c.restarts > 4096) bad("config.restarts: expected 1..4096");
    if (c.iterations < 1 || c.iterations > 100000)
        bad("config.iterations: expected 1..100000");
    if (c.samples < 1 || c.samples > 10000) bad("config.samples: expected 1..10000");
    if (c.workers < 1 || c.workers > 256) bad("config.workers: expected 1..256");
    if (c.grid < 8 || c.grid > 8192) bad("config.grid: expected 8..8192");
    if (c.out.empty()) bad("config.out: output directory must not be empty");
    validate_hspec(c.h, c.q, c.d, "config.h");
    validate_hspec(c.hprime, c.q, c.d, "config.hprime");
    const auto& s = c.schedule;
    if (s.kind != "additive" && s.kind != "dilation")
        bad("config.schedule.kind: expected 'additive' or 'dilation'");
    if (s.length < 1 || s.length > 64) bad("config.schedule.length: expected 1..64");
    if (!(s.decay > 0.0 && s.decay < 1.0))
        bad("config.schedule.decay: expected a value strictly between 0 and 1");
    if (!std::isfinite(s.magnitude) || s.magnitude < 0.0)
        bad("config.schedule.magnitude: expected a finite nonnegative value");
    if (s.band < 0 || s.band > c.q) bad("config.schedule.band: expected 0..q");
}

ordered_json hspec_json(const HSpec& s) {
    if (s.kind == "identity") return ordered_json("identity");
    if (s.kind == "scalar") return ordered_json("scalar:" + fmt_exact(s.value));
    if (s.kind == "random")
        return ordered_json("random:band=" + std::to_string(s.band) +
                            ",mag=" + fmt_exact(s.magnitude));
    ordered_json blocks = ordered_json::array();
    for (const auto& blk : s.blocks) {
        ordered_json b = ordered_json::array();
        for (const auto& e : blk)
            b.push_back(ordered_json::array({e.m, e.n, e.re, e.im}));
        blocks.push_back(std::move(b));
    }
    ordered_json obj;
    obj["blocks"] = std::move(blocks);
    return obj;
}

// ---------------------------------------------------------------- suites

struct SuiteRow {
    std::string name;
    std::string kind;  // residual | lower | witness
    long long checks = 0;
    long long failures = 0;
    double worst = 0.0;
    double threshold = 0.0;
};

// residual suites: worst = max residual, a check fails above the threshold.
void add_residual(SuiteRow& s, double r) {
    s.worst = s.checks == 0 ? r : std::max(s.worst, r);
    ++s.checks;
    if (!(r <= s.threshold)) ++s.failures;
}

// lower/witness suites: worst = min value, a check fails below the threshold.
void add_lower(SuiteRow& s, double v) {
    s.worst = s.checks == 0 ? v : std::min(s.worst, v);
    ++s.checks;
    if (!(v >= s.threshold)) ++s.failures;
}

std::string suite_status(const SuiteRow& s) {
    if (s.failures != 0 || s.checks == 0) return "fail";
    return s.kind == "witness" ? "expected-violation" : "pass";
}

struct SuiteCtx {
    TorusPtr t;
    int q;
    int samples;
    std::uint64_t seed;
    DerivationFamily fam;  // standard pair
    CliffordRep cliff;     // two generators
};

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

Complex root_phase(const SuiteCtx& c, long long e) {
    const double pi = std::acos(-1.0);
    const long long r = ((e % c.q) + c.q) % c.q;
    return std::polar(1.0, 2.0 * pi * c.t->p() * static_cast<double>(r) / c.q);
}

SuiteRow suite_weyl_relation(const SuiteCtx& c, std::uint64_t seed) {
    SuiteRow s{"weyl-relation", "residual", 0, 0, 0.0, 1e-13};
    const auto& t = c.t;
    add_residual(s, max_abs(t->shift() * t->clock() -
                            t->omega() * (t->clock() * t->shift())));
    CMatrix up = cidentity(c.q), vp = cidentity(c.q);
    for (int k = 0; k < c.q; ++k) {
        up = up * t->shift();
        vp = vp * t->clock();
    }
    add_residual(s, max_abs(up - cidentity(c.q)));
    add_residual(s, max_abs(vp - cidentity(c.q)));
    for (int m = 0; m < c.q; ++m)
        for (int n = 0; n < c.q; ++n) {
            const CMatrix& w = t->weyl_matrix(m, n);
            add_residual(s, max_abs(w.adjoint() * w - cidentity(c.q)));
        }
    Rng rng(seed);
    for (int i = 0; i < c.samples; ++i) {
        const int m1 = static_cast<int>(rng.below(c.q));
        const int n1 = static_cast<int>(rng.below(c.q));
        const int m2 = static_cast<int>(rng.below(c.q));
        const int n2 = static_cast<int>(rng.below(c.q));
        const Complex phase = root_phase(c, -static_cast<long long>(n1) * m2);
        const CMatrix lhs = t->weyl_matrix(m1, n1) * t->weyl_matrix(m2, n2);
        const CMatrix rhs =
            phase * t->weyl_matrix((m1 + m2) % c.q, (n1 + n2) % c.q);
        add_residual(s, max_abs(lhs - rhs));
    }
    return s;
}

SuiteRow suite_weyl_basis(const SuiteCtx& c, std::uint64_t) {
    SuiteRow s{"weyl-basis", "residual", 0, 0, 0.0, 1e-12};
    for (int m = 0; m < c.q; ++m)
        for (int n = 0; n < c.q; ++n) {
            CMatrix f = c.t->fourier_decompose(c.t->weyl_matrix(m, n));
            f(m, n) -= 1.0;
            add_residual(s, max_abs(f));
        }
    return s;
}

SuiteRow suite_fourier_roundtrip(const SuiteCtx& c, std::uint64_t seed) {
    SuiteRow s{"fourier-roundtrip", "residual", 0, 0, 0.0, 1e-12};
    Rng rng(seed);
    for (int i = 0; i < c.samples; ++i) {
        const CMatrix m = rng.gaussian_cmatrix(c.q, c.q);
        add_residual(
            s, max_abs(c.t->fourier_assemble(c.t->fourier_decompose(m)) - m));
        const CMatrix f = rng.gaussian_cmatrix(c.q, c.q);
        add_residual(
            s, max_abs(c.t->fourier_decompose(c.t->fourier_assemble(f)) - f));
    }
    return s;
}

SuiteRow suite_trace(const SuiteCtx& c, std::uint64_t seed) {
    SuiteRow s{"trace", "residual", 0, 0, 0.0, 1e-13};
    add_residual(s, std::abs(tau(AlgebraElement::identity(c.t)) - Complex(1.0)));
    for (int m = 0; m < c.q; ++m)
        for (int n = 0; n < c.q; ++n) {
            if (m == 0 && n == 0) continue;
            add_residual(s, std::abs(tau(AlgebraElement::weyl(c.t, m, n))));
        }
    Rng rng(seed);
    for (int i = 0; i < c.samples; ++i) {
        const auto a =
            AlgebraElement::from_matrix(c.t, rng.gaussian_cmatrix(c.q, c.q));
        const auto b =
            AlgebraElement::from_matrix(c.t, rng.gaussian_cmatrix(c.q, c.q));
        add_residual(s, std::abs(tau(a * b) - tau(b * a)));
        add_residual(s, std::abs(tau(a.adjoint()) - std::conj(tau(a))));
    }
    return s;
}

SuiteRow suite_dual_action(const SuiteCtx& c, std::uint64_t seed) {
    SuiteRow s{"dual-action", "residual", 0, 0, 0.0, 1e-12};
    Rng rng(seed);
    for (int i = 0; i < c.samples; ++i) {
        const int sa = static_cast<int>(rng.below(c.q));
        const int sb = static_cast<int>(rng.below(c.q));
        const int m = static_cast<int>(rng.below(c.q));
        const int n = static_cast<int>(rng.below(c.q));
        const auto w = AlgebraElement::weyl(c.t, m, n);
        const Complex phase =
            root_phase(c, static_cast<long long>(m) * sa +
                              static_cast<long long>(n) * sb);
        add_residual(s, max_abs(dual_action(sa, sb, w).matrix() -
                                phase * w.matrix()));
        const auto a =
            AlgebraElement::from_matrix(c.t, rng.gaussian_cmatrix(c.q, c.q));
        const auto b =
            AlgebraElement::from_matrix(c.t, rng.gaussian_cmatrix(c.q, c.q));
        add_residual(s, max_abs(dual_action(sa, sb, a * b).matrix() -
                                (dual_action(sa, sb, a) * dual_action(sa, sb, b))
                                    .matrix()));
        add_residual(s, std::abs(tau(dual_action(sa, sb, a)) - tau(a)));
    }
    return s;
}

bool residue_additive(int x, int y, int q) {
    return symmetric_residue(x, q) + symmetric_residue(y, q) ==
           symmetric_residue((x + y) % q, q);
}

SuiteRow suite_derivation_leibniz(const SuiteCtx& c, std::uint64_t seed) {
    SuiteRow s{"derivation-leibniz", "residual", 0, 0, 0.0, 1e-12};
    for (int m1 = 0; m1 < c.q; ++m1)
        for (int n1 = 0; n1 < c.q; ++n1)
            for (int m2 = 0; m2 < c.q; ++m2)
                for (int n2 = 0; n2 < c.q; ++n2) {
                    if (!residue_additive(m1, m2, c.q) ||
                        !residue_additive(n1, n2, c.q))
                        continue;
                    const auto a = AlgebraElement::weyl(c.t, m1, n1);
                    const auto b = AlgebraElement::weyl(c.t, m2, n2);
                    for (int k = 0; k < 2; ++k) {
                        const auto lhs = derivation(c.fam, k, a * b);
                        const auto rhs = derivation(c.fam, k, a) * b +
                                         a * derivation(c.fam, k, b);
                        add_residual(s, max_abs(lhs.matrix() - rhs.matrix()));
                    }
                }
    const int band = (c.q - 1) / 4;
    Rng rng(seed);
    for (int i = 0; i < c.samples; ++i) {
        const auto a = AlgebraElement::random_hermitian(c.t, rng, band);
        const auto b = AlgebraElement::random_hermitian(c.t, rng, band);
        for (int k = 0; k < 2; ++k) {
            const auto lhs = derivation(c.fam, k, a * b);
            const auto rhs =
                derivation(c.fam, k, a) * b + a * derivation(c.fam, k, b);
            add_residual(s, max_abs(lhs.matrix() - rhs.matrix()));
        }
    }
    return s;
}

SuiteRow suite_wrapping_witness(const SuiteCtx& c, std::uint64_t) {
    SuiteRow s{"derivation-wrapping-witness", "witness", 0, 0, 0.0, 0.1};
    const int mstar = c.q % 2 == 0 ? c.q / 2 : (c.q + 1) / 2;
    for (int k = 0; k < 2; ++k) {
        const auto a = k == 0 ? AlgebraElement::weyl(c.t, mstar, 0)
                              : AlgebraElement::weyl(c.t, 0, mstar);
        const auto lhs = derivation(c.fam, k, a * a);
        const auto rhs =
            derivation(c.fam, k, a) * a + a * derivation(c.fam, k, a);
        add_lower(s, max_abs(lhs.matrix() - rhs.matrix()));
    }
    return s;
}

SuiteRow suite_gns_left_regular(const SuiteCtx& c, std::uint64_t seed) {
    SuiteRow s{"gns-left-regular", "residual", 0, 0, 0.0, 1e-12};
    const auto dim = c.t->gns_dim();
    add_residual(s, max_abs(left_regular(AlgebraElement::identity(c.t)).mat -
                            cidentity(dim)));
    Rng rng(seed);
    for (int i = 0; i < c.samples; ++i) {
        const auto a =
            AlgebraElement::from_matrix(c.t, rng.gaussian_cmatrix(c.q, c.q));
        const auto b =
            AlgebraElement::from_matrix(c.t, rng.gaussian_cmatrix(c.q, c.q));
        add_residual(s, max_abs(left_regular(a * b).mat -
                                left_regular(a).mat * left_regular(b).mat));
        add_residual(s, std::abs(op_norm(left_regular(a).mat) - a.op_norm()) /
                            std::max(1.0, a.op_norm()));
        add_residual(s, max_abs(left_regular(a.adjoint()).mat -
                                left_regular(a).mat.adjoint()));
    }
    return s;
}

SuiteRow suite_gns_commutant(const SuiteCtx& c, std::uint64_t seed) {
    SuiteRow s{"gns-commutant", "residual", 0, 0, 0.0, 1e-10};
    Rng rng(seed);
    for (int i = 0; i < c.samples; ++i) {
        const auto a =
            AlgebraElement::from_matrix(c.t, rng.gaussian_cmatrix(c.q, c.q));
        const auto b =
            AlgebraElement::from_matrix(c.t, rng.gaussian_cmatrix(c.q, c.q));
        const CMatrix la = left_regular(a).mat;
        const CMatrix rb = commutant_right(b).mat;
        add_residual(s, op_norm(la * rb - rb * la));
        add_residual(s, max_abs(commutant_right(a * b).mat -
                                commutant_right(b).mat * commutant_right(a).mat));
    }
    return s;
}

SuiteRow suite_modular_conjugation(const SuiteCtx& c, std::uint64_t seed) {
    SuiteRow s{"modular-conjugation", "residual", 0, 0, 0.0, 1e-12};
    const CMatrix sm = modular_basis_matrix(c.t);
    add_residual(s, max_abs(sm * sm.conjugate() - cidentity(c.t->gns_dim())));
    Rng rng(seed);
    for (int i = 0; i < c.samples; ++i) {
        const auto a =
            AlgebraElement::from_matrix(c.t, rng.gaussian_cmatrix(c.q, c.q));
        add_residual(s, max_abs(modular_conj(c.t, left_regular(a)).mat -
                                commutant_right(a.adjoint()).mat));
        GnsOperator g{rng.gaussian_cmatrix(c.t->gns_dim(), c.t->gns_dim()),
                      OpTag::general};
        add_residual(s, max_abs(modular_conj(c.t, modular_conj(c.t, g)).mat -
                                g.mat));
    }
    return s;
}

SuiteRow suite_clifford(const SuiteCtx&, std::uint64_t) {
    SuiteRow s{"clifford", "residual", 0, 0, 0.0, 1e-12};
    for (int d = 1; d <= 5; ++d) {
        const CliffordRep rep = clifford_rep(d);
        const auto dim = rep.dim;
        const Eigen::Index expect = Eigen::Index(1) << ((d + 1) / 2);
        add_residual(s, static_cast<double>(std::abs(dim - expect)));
        for (int i = 0; i < d; ++i) {
            add_residual(s, hermiticity_defect(rep.gamma[i]));
            for (int j = i; j < d; ++j) {
                const CMatrix anti =
                    rep.gamma[i] * rep.gamma[j] + rep.gamma[j] * rep.gamma[i];
                const CMatrix want =
                    i == j ? CMatrix(2.0 * cidentity(dim)) : CMatrix::Zero(dim, dim);
                add_residual(s, max_abs(anti - want));
            }
        }
    }
    const CliffordRep two = clifford_rep(2);
    add_residual(s, max_abs(two.gamma[0] - pauli1()));
    add_residual(s, max_abs(two.gamma[1] - pauli2()));
    return s;
}

SuiteRow suite_dirac_flat(const SuiteCtx& c, std::uint64_t) {
    SuiteRow s{"dirac-flat", "residual", 0, 0, 0.0, 1e-12};
    const CMatrix d = flat_dirac(c.t, c.fam, c.cliff);
    add_residual(s, hermiticity_defect(d) / std::max(1.0, op_norm(d)));
    const CMatrix pid =
        spinor_representation(AlgebraElement::identity(c.t), c.cliff.dim);
    add_residual(s, max_abs(d * pid - pid * d));
    // spectrum: +-sqrt(r1^2 + r2^2) over the symmetric residues of (m, n)
    std::vector<double> expected;
    for (int m = 0; m < c.q; ++m)
        for (int n = 0; n < c.q; ++n) {
            const double v = std::hypot(symmetric_residue(m, c.q),
                                        symmetric_residue(n, c.q));
            expected.push_back(v);
            expected.push_back(-v);
        }
    std::sort(expected.begin(), expected.end(), std::greater<double>());
    const auto eig = herm_eig(d);
    double worst = 0.0;
    for (std::size_t i = 0; i < expected.size(); ++i)
        worst = std::max(worst,
                         std::abs(eig.values[static_cast<Eigen::Index>(i)] -
                                  expected[i]));
    add_residual(s, worst);
    // formula seminorm: lip((U + U*)/2) equals max_k |sin(2 pi k p / q)|
    const LipSeminorm flat = LipSeminorm::flat(c.t);
    const auto u = AlgebraElement::weyl(c.t, 1, 0);
    const auto a = Complex(0.5) * (u + u.adjoint());
    const double pi = std::acos(-1.0);
    double want = 1.0;  // q = 2: U* = U and the boundary residue keeps lip = 1
    if (c.q > 2) {
        want = 0.0;
        for (int k = 0; k < c.q; ++k)
            want = std::max(want,
                            std::abs(std::sin(2.0 * pi * c.t->p() * k / c.q)));
    }
    add_residual(s, std::abs(flat.eval(a) - want));
    add_residual(s, flat.eval(AlgebraElement::identity(c.t)));
    add_residual(s, std::abs(flat.eval(Complex(2.0) * a) - 2.0 * flat.eval(a)));
    return s;
}

SuiteRow suite_dirac_compression(const SuiteCtx& c, std::uint64_t seed) {
    SuiteRow s{"dirac-compression", "residual", 0, 0, 0.0, 1e-9};
    Rng rng(seed);
    for (int i = 0; i < c.samples; ++i) {
        const auto h = random_coefficients(c.t, 2, c.q, 0.35,
                                           task_seed(seed, 100 + i), i % 2 == 0);
        const CurvedDirac cd(h, c.fam, c.cliff);
        const auto a = AlgebraElement::random_hermitian(c.t, rng, c.q);
        const double lip = cd.lip(a);
        for (int j = 0; j < 2; ++j)
            add_residual(s, op_norm(cd.channel(a, j)) - lip);
    }
    return s;
}

SuiteRow suite_dirac_perturbation(const SuiteCtx& c, std::uint64_t seed) {
    SuiteRow s{"dirac-perturbation", "residual", 0, 0, 0.0, 1e-9};
    Rng rng(seed);
    for (int i = 0; i < c.samples; ++i) {
        const auto h = random_coefficients(c.t, 2, c.q, 0.3,
                                           task_seed(seed, 200 + i), i % 2 == 0);
        const auto hp = random_coefficients(c.t, 2, c.q, 0.3,
                                            task_seed(seed, 300 + i), i % 2 == 1);
        const CurvedDirac dh(h, c.fam, c.cliff);
        const CurvedDirac dhp(hp, c.fam, c.cliff);
        const auto a = AlgebraElement::random_hermitian(c.t, rng, c.q);
        const double lh = dh.lip(a);
        const double lhp = dhp.lip(a);
        const PairingDelta pd = pairing_delta(h, hp);
        add_residual(s, std::abs(lhp - lh) - pd.fwd * lh);
        add_residual(s, std::abs(lh - lhp) - pd.bwd * lhp);
    }
    return s;
}

SuiteRow suite_dirac_symmetrized(const SuiteCtx& c, std::uint64_t seed) {
    SuiteRow s{"dirac-symmetrized", "residual", 0, 0, 0.0, 1e-9};
    const int band = (c.q - 1) / 4;
    Rng rng(seed);
    for (int i = 0; i < c.samples; ++i) {
        const auto h = random_coefficients(c.t, 2, band, 0.3,
                                           task_seed(seed, 400 + i), true);
        const auto a = AlgebraElement::random_hermitian(c.t, rng, band);
        add_residual(s, symmetrized_commutator_residual(h, c.fam, c.cliff, a));
    }
    return s;
}

SuiteRow suite_sandwich_identity(const SuiteCtx& c, std::uint64_t seed) {
    SuiteRow s{"sandwich-identity", "residual", 0, 0, 0.0, 1e-9};
    const CMatrix d = flat_dirac(c.t, c.fam, c.cliff);
    Rng rng(seed);
    const int mstar = c.q % 2 == 0 ? c.q / 2 : (c.q + 1) / 2;
    for (int i = 0; i < c.samples + 2; ++i) {
        const auto k =
            SpinorCommutant::random_hermitian(c.t, c.cliff.dim, rng, 0.5);
        AlgebraElement a = AlgebraElement::identity(c.t);
        if (i == 0) {
            const auto w = AlgebraElement::weyl(c.t, mstar, 0);
            a = Complex(0.5) * (w + w.adjoint());
        } else if (i == 1) {
            const auto w = AlgebraElement::weyl(c.t, c.q - 1, c.q - 1);
            a = Complex(0.5) * (w + w.adjoint());
        } else {
            a = AlgebraElement::random_hermitian(c.t, rng, c.q);
        }
        const CMatrix pa = spinor_representation(a, c.cliff.dim);
        const CMatrix want = k.matrix() * (d * pa - pa * d) * k.matrix();
        add_residual(s, op_norm(sandwich_commutator(k, d, a) - want));
    }
    return s;
}

SuiteRow suite_lip_kernel_gap(const SuiteCtx& c, std::uint64_t seed) {
    SuiteRow s{"lip-kernel-gap", "lower", 0, 0, 0.0, 1e-8};
    add_lower(s, kernel_gap(LipSeminorm::flat(c.t)));
    for (int i = 0; i < 2; ++i) {
        const auto h = random_coefficients(c.t, 2, c.q, 0.3,
                                           task_seed(seed, 500 + i), i == 0);
        add_lower(s, kernel_gap(LipSeminorm::curved(c.t, h, c.fam, c.cliff)));
    }
    Rng rng(seed);
    const auto k = SpinorCommutant::random_hermitian(c.t, c.cliff.dim, rng, 0.5);
    const CMatrix d = flat_dirac(c.t, c.fam, c.cliff);
    add_lower(s, kernel_gap(LipSeminorm::sandwich(k, d)));
    return s;
}

SuiteRow suite_metric_leibniz(const SuiteCtx& c, std::uint64_t seed) {
    SuiteRow s{"metric-leibniz", "lower", 0, 0, 0.0, -1e-9};
    const LipSeminorm flat = LipSeminorm::flat(c.t);
    const int band = (c.q - 1) / 4;
    Rng rng(seed);
    for (int i = 0; i < c.samples; ++i) {
        const auto a = AlgebraElement::random_hermitian(c.t, rng, band);
        const auto b = AlgebraElement::random_hermitian(c.t, rng, band);
        const LeibnizSlack slack = leibniz_residual(flat, a, b);
        add_lower(s, slack.jordan);
        add_lower(s, slack.lie);
    }
    return s;
}

SuiteRow suite_mk_solver(const SuiteCtx& c, std::uint64_t seed) {
    SuiteRow s{"mk-solver", "residual", 0, 0, 0.0, 1e-4};
    const LipSeminorm flat = LipSeminorm::flat(c.t);
    const LipSeminorm twice = flat.scaled(2.0);
    MkBudget mb;
    mb.restarts = 32;
    mb.iterations = 200;
    Rng rng(seed);
    for (int i = 0; i < 3; ++i) {
        mb.seed = task_seed(seed, 600 + i);
        const State phi = State::random_mixed(c.q, rng);
        const State psi = State::random_mixed(c.q, rng);
        const MkResult fwd = mk_distance(flat, phi, psi, mb);
        const MkResult bwd = mk_distance(flat, psi, phi, mb);
        // the two directions agree within solver accuracy only
        add_residual(s, std::abs(fwd.value - bwd.value) /
                            std::max(1.0, fwd.value));
        const MkResult half = mk_distance(twice, phi, psi, mb);
        // dyadic rescaling must track bit-exactly
        const double sres = std::abs(half.value - fwd.value / 2.0);
        add_residual(s, sres == 0.0 ? 0.0 : 1.0 + sres);
        add_residual(s, mk_distance(flat, phi, phi, mb).value);
        if (fwd.value > 0.0)
            add_residual(s, std::abs(flat.eval(fwd.witness) - 1.0));
    }
    return s;
}

SuiteRow suite_state_validation(const SuiteCtx& c, std::uint64_t seed) {
    SuiteRow s{"state-validation", "residual", 0, 0, 0.0, 1e-12};
    Rng rng(seed);
    for (int i = 0; i < c.samples; ++i) {
        const CVector v = rng.unit_cvector(c.q);
        const State pure = State::pure(v);
        add_residual(s, std::abs(pure.expect(cidentity(c.q)) - 1.0));
        const CMatrix a = rng.gaussian_hermitian(c.q);
        const double form = (v.adjoint() * a * v).value().real();
        add_residual(s, std::abs(pure.expect(a) - form));
        const State mixed = State::random_mixed(c.q, rng);
        add_residual(s, std::abs(mixed.expect(cidentity(c.q)) - 1.0));
        const auto eig = herm_eig(mixed.density());
        add_residual(s, std::max(0.0, -eig.values.minCoeff()));
    }
    bool rejected = false;
    try {
        CMatrix bad_density = -cidentity(c.q);
        (void)State::from_density(c.q, bad_density);
    } catch (const error&) {
        rejected = true;
    }
    add_residual(s, rejected ? 0.0 : 1.0);
    return s;
}

std::vector<SuiteRow> run_suites(const SuiteCtx& c, int workers) {
    using SuiteFn = SuiteRow (*)(const SuiteCtx&, std::uint64_t);
    struct Entry {
        int id;
        SuiteFn fn;
    };
    std::vector<Entry> table = {
        {1, suite_weyl_relation},     {2, suite_weyl_basis},
        {3, suite_fourier_roundtrip}, {4, suite_trace},
        {5, suite_dual_action},       {6, suite_derivation_leibniz},
        {7, suite_wrapping_witness},  {8, suite_gns_left_regular},
        {9, suite_gns_commutant},     {10, suite_modular_conjugation},
        {11, suite_clifford},         {12, suite_dirac_flat},
        {13, suite_dirac_compression},{14, suite_dirac_perturbation},
        {15, suite_dirac_symmetrized},{16, suite_sandwich_identity},
        {17, suite_lip_kernel_gap},   {18, suite_metric_leibniz},
        {19, suite_mk_solver},        {20, suite_state_validation},
    };
    if (c.q > 4)  // the solver suite would dominate the run at large q
        table.erase(std::remove_if(table.begin(), table.end(),
                                   [](const Entry& e) { return e.id == 19; }),
                    table.end());
    std::vector<SuiteRow> rows(table.size());
    parallel_for(static_cast<int>(table.size()), workers, [&](int i) {
        rows[static_cast<std::size_t>(i)] = table[static_cast<std::size_t>(i)]
            .fn(c, task_seed(c.seed, 5000 + static_cast<std::uint64_t>(
                                                table[static_cast<std::size_t>(i)]
                                                    .id)));
    });
    return rows;
}

// ---------------------------------------------------------------- modes

struct ModeOutput {
    std::string csv;
    ordered_json summary;
    bool violation = false;
    double wall_ms = 0.0;
};

ModeOutput run_axioms(const ExperimentConfig& cfg) {
    const auto t = make_torus(cfg.q, cfg.p);
    const SuiteCtx c{t,        cfg.q,
                     cfg.samples, cfg.seed,
                     DerivationFamily::standard(t), clifford_rep(2)};
    const auto rows = run_suites(c, cfg.workers);
    ModeOutput out;
    out.csv = csv_line({"suite", "kind", "checks", "failures", "worst",
                        "threshold", "status"});
    long long failures = 0;
    ordered_json failed = ordered_json::array();
    for (const auto& r : rows) {
        const std::string status = suite_status(r);
        out.csv += csv_line({r.name, r.kind, std::to_string(r.checks),
                             std::to_string(r.failures), fmt_g12(r.worst),
                             fmt_g12(r.threshold), status});
        failures += r.failures;
        if (status == "fail") {
            failed.push_back(r.name);
            out.violation = true;
        }
    }
    out.summary["suites"] = rows.size();
    out.summary["failed_checks"] = failures;
    out.summary["failed_suites"] = std::move(failed);
    return out;
}

DerivationFamily family_for(const TorusPtr& t, int d) {
    return d == 2 ? DerivationFamily::standard(t) : standard_family(t, d);
}

LipSeminorm flat_for(const TorusPtr& t, int d) {
    return d == 2 ? LipSeminorm::flat(t)
                  : LipSeminorm::flat(t, standard_family(t, d), clifford_rep(d));
}

double fixed_diameter(const LipSeminorm& l, std::uint64_t seed) {
    DiamBudget db;  // fixed solver budget so CLI knobs cannot move the CSV
    db.seed = seed;
    return diameter(l, db).value;
}

std::vector<std::string> bound_header() {
    return {"n",
            "length_fn",
            "delta_fwd",
            "delta_bwd",
            "lemma_bound",
            "closed_form_corrected",
            "closed_form_literal",
            "empirical_ratio",
            "diam_flat",
            "wall_time_ms"};
}

std::vector<std::string> bound_row_fields(const BoundReport& r) {
    return {std::to_string(r.n),
            fmt_g12(r.length_fn),
            fmt_g12(r.delta_fwd),
            fmt_g12(r.delta_bwd),
            fmt_g12(r.lemma_bound),
            fmt_g12(r.closed_form_corrected),
            fmt_g12(r.closed_form_literal),
            fmt_g12(r.empirical_ratio),
            fmt_g12(r.diam_flat),
            ""};
}

// nonnegative columns, sampled ratio below the pairing delta, and the two
// assemblies of the corrected bound agreeing
bool bound_row_ok(const BoundReport& r) {
    const double nonneg[] = {r.length_fn,   r.delta_fwd,
                             r.delta_bwd,   r.diam_flat,
                             r.lemma_bound, r.closed_form_corrected,
                             r.closed_form_literal};
    for (const double v : nonneg)
        if (!(v >= 0.0) || !std::isfinite(v)) return false;
    if (!(r.empirical_ratio <=
          std::max(r.delta_fwd, r.delta_bwd) + 1e-9))
        return false;
    return std::abs(r.closed_form_corrected - r.lemma_bound) <=
           1e-12 * std::max(1.0, r.lemma_bound);
}

ModeOutput run_bound(const ExperimentConfig& cfg) {
    const auto t = make_torus(cfg.q, cfg.p);
    const auto h = build_coefficients(t, cfg.d, cfg.h, cfg.seed, 101);
    const auto hp = build_coefficients(t, cfg.d, cfg.hprime, cfg.seed, 102);
    const double diam_flat =
        fixed_diameter(flat_for(t, cfg.d), task_seed(cfg.seed, 901));
    SampleBudget sb;
    sb.samples = cfg.samples;
    sb.seed = task_seed(cfg.seed, 903);
    const BoundReport r = propinquity_bound(h, hp, diam_flat, sb);
    ModeOutput out;
    out.csv = csv_line(bound_header()) + csv_line(bound_row_fields(r));
    out.violation = !bound_row_ok(r);
    out.summary["delta_fwd"] = r.delta_fwd;
    out.summary["delta_bwd"] = r.delta_bwd;
    out.summary["diam_flat"] = r.diam_flat;
    out.summary["diam_h"] = r.diam_h;
    out.summary["diam_hprime"] = r.diam_hprime;
    out.summary["lemma_bound"] = r.lemma_bound;
    out.summary["closed_form_corrected"] = r.closed_form_corrected;
    out.summary["closed_form_literal"] = r.closed_form_literal;
    out.summary["empirical_ratio"] = r.empirical_ratio;
    return out;
}

ModeOutput run_converge(const ExperimentConfig& cfg) {
    const auto t = make_torus(cfg.q, cfg.p);
    const auto h = build_coefficients(t, cfg.d, cfg.h, cfg.seed, 101);
    const auto& sc = cfg.schedule;
    const ScheduleKind kind =
        sc.kind == "additive" ? ScheduleKind::additive : ScheduleKind::dilation;
    std::optional<CoefficientMatrix> direction;
    if (kind == ScheduleKind::additive)
        direction = random_direction(t, cfg.d, sc.band, sc.magnitude,
                                     task_seed(cfg.seed, 103), true);
    const auto schedule =
        make_schedule(h, kind, sc.length, sc.decay, direction);
    const double diam_flat =
        fixed_diameter(flat_for(t, cfg.d), task_seed(cfg.seed, 901));
    SampleBudget sb;
    sb.samples = cfg.samples;
    sb.seed = task_seed(cfg.seed, 903);
    const int n = static_cast<int>(schedule.size());
    std::vector<BoundReport> rows(static_cast<std::size_t>(n));
    std::vector<double> row_ms(static_cast<std::size_t>(n), 0.0);
    parallel_for(n, cfg.workers, [&](int i) {
        const auto t0 = SteadyClock::now();
        rows[static_cast<std::size_t>(i)] =
            convergence_row(h, schedule[static_cast<std::size_t>(i)], i,
                            diam_flat, sb);
        row_ms[static_cast<std::size_t>(i)] = ms_since(t0);
    });
    ModeOutput out;
    out.csv = csv_line(bound_header());
    for (const auto& r : rows) {
        out.csv += csv_line(bound_row_fields(r));
        if (!bound_row_ok(r)) out.violation = true;
    }
    out.summary["rows"] = n;
    out.summary["c_constant"] = convergence_constant(rows);
    out.summary["final_length_fn"] = rows.back().length_fn;
    out.summary["final_closed_form"] = rows.back().closed_form_corrected;
    out.summary["row_wall_time_ms"] = row_ms;
    return out;
}

ModeOutput run_mk(const ExperimentConfig& cfg) {
    const auto t = make_torus(cfg.q, cfg.p);
    const auto h = build_coefficients(t, cfg.d, cfg.h, cfg.seed, 101);
    const LipSeminorm l =
        LipSeminorm::curved(t, h, family_for(t, cfg.d), clifford_rep(cfg.d));
    l.images();  // warm the shared cache before fanning out
    const bool with_oracle = cfg.q == 2;
    if (with_oracle) l.sphere_norm_table(cfg.grid);
    const LipSeminorm twice = l.scaled(2.0);
    const int n = cfg.samples;
    std::vector<std::string> lines(static_cast<std::size_t>(n));
    std::vector<double> scaling(static_cast<std::size_t>(n), 0.0);
    std::vector<double> rel_err(static_cast<std::size_t>(n), 0.0);
    parallel_for(n, cfg.workers, [&](int i) {
        Rng ra(task_seed(cfg.seed, 0xA000 + 2 * static_cast<std::uint64_t>(i)));
        Rng rb(task_seed(cfg.seed,
                         0xA001 + 2 * static_cast<std::uint64_t>(i)));
        const State phi = State::random_mixed(cfg.q, ra);
        const State psi = State::random_mixed(cfg.q, rb);
        MkBudget mb;
        mb.restarts = cfg.restarts;
        mb.iterations = cfg.iterations;
        mb.seed = task_seed(cfg.seed, 0xB000 + static_cast<std::uint64_t>(i));
        const MkResult one = mk_distance(l, phi, psi, mb);
        const MkResult half = mk_distance(twice, phi, psi, mb);
        const double sres = std::abs(half.value - one.value / 2.0);
        scaling[static_cast<std::size_t>(i)] = sres;
        std::string oracle_field;
        std::string rel_field;
        if (with_oracle) {
            const double oracle = mk_oracle_grid(l, phi, psi, cfg.grid);
            const double rel =
                std::abs(one.value - oracle) / std::max(oracle, 1e-12);
            rel_err[static_cast<std::size_t>(i)] = rel;
            oracle_field = fmt_g12(oracle);
            rel_field = fmt_g12(rel);
        }
        lines[static_cast<std::size_t>(i)] =
            csv_line({std::to_string(i), fmt_g12(one.value),
                      fmt_g12(half.value), fmt_g12(sres), oracle_field,
                      rel_field});
    });
    ModeOutput out;
    out.csv = csv_line(
        {"sample", "mk", "mk_scaled", "scaling_residual", "oracle",
         "oracle_rel_err"});
    for (const auto& line : lines) out.csv += line;
    const double worst_scaling =
        *std::max_element(scaling.begin(), scaling.end());
    if (worst_scaling > 0.0) out.violation = true;
    out.summary["samples"] = n;
    out.summary["max_scaling_residual"] = worst_scaling;
    if (with_oracle) {
        const double worst_rel =
            *std::max_element(rel_err.begin(), rel_err.end());
        if (worst_rel > 0.02) out.violation = true;
        out.summary["max_oracle_rel_err"] = worst_rel;
    }
    return out;
}

ModeOutput run_sandwich(const ExperimentConfig& cfg) {
    const auto t = make_torus(cfg.q, cfg.p);
    const auto fam = family_for(t, cfg.d);
    const CliffordRep cliff = clifford_rep(cfg.d);
    const CMatrix d = flat_dirac(t, fam, cliff);
    const int n = cfg.samples;
    std::vector<std::string> lines(static_cast<std::size_t>(n));
    std::vector<double> defects(static_cast<std::size_t>(n), 0.0);
    parallel_for(n, cfg.workers, [&](int i) {
        Rng rng(task_seed(cfg.seed, 0xC000 + static_cast<std::uint64_t>(i)));
        const auto hk =
            SpinorCommutant::random_hermitian(t, cliff.dim, rng, 0.5);
        const auto kk =
            SpinorCommutant::random_hermitian(t, cliff.dim, rng, 0.5);
        const auto a = AlgebraElement::random_hermitian(t, rng, cfg.q);
        const double delta = sandwich_delta(hk, kk);
        const double lh = sandwich_lip(hk, d, a);
        const double lk = sandwich_lip(kk, d, a);
        const double defect = std::abs(lh - lk) - delta * lk;
        defects[static_cast<std::size_t>(i)] = defect;
        lines[static_cast<std::size_t>(i)] = csv_line(
            {std::to_string(i), fmt_g12(delta), fmt_g12(lh), fmt_g12(lk),
             fmt_g12(defect), defect <= 1e-9 ? "1" : "0"});
    });
    ModeOutput out;
    out.csv =
        csv_line({"sample", "delta", "lip_h", "lip_k", "defect", "ok"});
    for (const auto& line : lines) out.csv += line;
    const double worst = *std::max_element(defects.begin(), defects.end());
    out.violation = worst > 1e-9;
    out.summary["samples"] = n;
    out.summary["max_defect"] = worst;
    return out;
}

ModeOutput run_mode(const std::string& mode, const ExperimentConfig& cfg) {
    const auto t0 = SteadyClock::now();
    ModeOutput out;
    if (mode == "axioms")
        out = run_axioms(cfg);
    else if (mode == "bound")
        out = run_bound(cfg);
    else if (mode == "mk")
        out = run_mk(cfg);
    else if (mode == "sandwich")
        out = run_sandwich(cfg);
    else if (mode == "converge")
        out = run_converge(cfg);
    else
        bad("config.mode: unknown mode '" + mode + "'");
    out.wall_ms = ms_since(t0);
    return out;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw error("cannot open " + path.string() + " for writing");
    f << text;
    f.flush();
    if (!f) throw error("failed writing " + path.string());
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    ordered_json root;
    try {
        root = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        bad(std::string("config: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) bad("config: top level must be an object");
    for (auto it = root.begin(); it != root.end(); ++it)
        if (!known_key(kTopKeys, it.key()))
            bad("config: unknown key '" + it.key() + "'");
    ExperimentConfig c;
    c.mode = get_string(root, "mode", c.mode);
    c.q = get_int(root, "q", c.q);
    c.p = get_int(root, "p", c.p);
    c.d = get_int(root, "d", c.d);
    c.seed = get_u64(root, "seed", c.seed);
    c.restarts = get_int(root, "restarts", c.restarts);
    c.iterations = get_int(root, "iterations", c.iterations);
    c.samples = get_int(root, "samples", c.samples);
    c.workers = get_int(root, "workers", c.workers);
    c.grid = get_int(root, "grid", c.grid);
    c.out = get_string(root, "out", c.out);
    if (root.contains("h")) c.h = parse_hspec(root.at("h"), "config.h");
    if (root.contains("hprime"))
        c.hprime = parse_hspec(root.at("hprime"), "config.hprime");
    if (root.contains("schedule")) {
        const auto& s = root.at("schedule");
        if (!s.is_object()) bad("config.schedule: expected an object");
        for (auto it = s.begin(); it != s.end(); ++it)
            if (!known_key(kScheduleKeys, it.key()))
                bad("config.schedule: unknown key '" + it.key() + "'");
        auto& sc = c.schedule;
        if (s.contains("kind")) {
            if (!s.at("kind").is_string())
                bad("config.schedule.kind: expected a string");
            sc.kind = s.at("kind").get<std::string>();
        }
        if (s.contains("length")) {
            if (!s.at("length").is_number_integer())
                bad("config.schedule.length: expected an integer");
            sc.length = static_cast<int>(s.at("length").get<std::int64_t>());
        }
        sc.decay = get_real(s, "decay", sc.decay, "config.schedule");
        sc.magnitude = get_real(s, "magnitude", sc.magnitude, "config.schedule");
        if (s.contains("band")) {
            if (!s.at("band").is_number_integer())
                bad("config.schedule.band: expected an integer");
            sc.band = static_cast<int>(s.at("band").get<std::int64_t>());
        }
    }
    validate_config(c);
    return c;
}

std::string serialize_config(const ExperimentConfig& cfg) {
    ordered_json j;
    j["mode"] = cfg.mode;
    j["q"] = cfg.q;
    j["p"] = cfg.p;
    j["d"] = cfg.d;
    j["seed"] = cfg.seed;
    j["restarts"] = cfg.restarts;
    j["iterations"] = cfg.iterations;
    j["samples"] = cfg.samples;
    j["workers"] = cfg.workers;
    j["grid"] = cfg.grid;
    j["out"] = cfg.out;
    j["h"] = hspec_json(cfg.h);
    j["hprime"] = hspec_json(cfg.hprime);
    ordered_json s;
    s["kind"] = cfg.schedule.kind;
    s["length"] = cfg.schedule.length;
    s["decay"] = cfg.schedule.decay;
    s["magnitude"] = cfg.schedule.magnitude;
    s["band"] = cfg.schedule.band;
    j["schedule"] = std::move(s);
    return j.dump(2) + "\n";
}

CoefficientMatrix build_coefficients(const TorusPtr& t, int d,
                                     const HSpec& spec,
                                     std::uint64_t master_seed,
                                     std::uint64_t tag) {
    if (spec.kind == "identity") return CoefficientMatrix::identity(t, d);
    if (spec.kind == "scalar")
        return CoefficientMatrix::scalar(t, d, Complex(spec.value, 0.0));
    if (spec.kind == "random")
        return random_coefficients(t, d, spec.band, spec.magnitude,
                                   task_seed(master_seed, tag), true);
    if (spec.kind == "blocks") {
        if (static_cast<int>(spec.blocks.size()) != d * d)
            bad("coefficient blocks: expected d*d Fourier tables row-major");
        std::vector<AlgebraElement> grid;
        grid.reserve(spec.blocks.size());
        for (const auto& blk : spec.blocks) {
            CMatrix f = CMatrix::Zero(t->q(), t->q());
            for (const auto& e : blk) {
                if (e.m < 0 || e.m >= t->q() || e.n < 0 || e.n >= t->q())
                    bad("coefficient blocks: Fourier index out of range");
                f(e.m, e.n) += Complex(e.re, e.im);
            }
            grid.push_back(AlgebraElement::from_fourier(t, f));
        }
        return CoefficientMatrix::assemble(t, grid, d);
    }
    bad("coefficient spec: unknown kind '" + spec.kind + "'");
}

RunResult run_experiment(const ExperimentConfig& cfg,
                         const std::string& out_dir) {
    validate_config(cfg);
    fs::create_directories(out_dir);
    const auto t0 = SteadyClock::now();
    const bool all = cfg.mode == "check-all";
    std::vector<std::string> modes;
    if (all)
        modes = {"axioms", "bound", "mk", "sandwich", "converge"};
    else
        modes = {cfg.mode};
    RunResult res;
    ordered_json manifest;
    manifest["version"] = kVersion;
    manifest["mode"] = cfg.mode;
    manifest["config"] = ordered_json::parse(serialize_config(cfg));
    ordered_json results;
    std::string summary;
    for (const auto& m : modes) {
        ModeOutput out = run_mode(m, cfg);
        const std::string fname = all ? "results_" + m + ".csv" : "results.csv";
        write_file(fs::path(out_dir) / fname, out.csv);
        res.artifacts.push_back(fname);
        ordered_json entry;
        entry["artifact"] = fname;
        entry["status"] = out.violation ? "violation" : "ok";
        entry["wall_time_ms"] = out.wall_ms;
        entry["summary"] = std::move(out.summary);
        results[m] = std::move(entry);
        if (out.violation) res.status = RunStatus::violation;
        if (!summary.empty()) summary += "; ";
        summary += m + (out.violation ? ": violation" : ": ok");
    }
    manifest["status"] = res.status == RunStatus::ok ? "ok" : "violation";
    manifest["total_wall_time_ms"] = ms_since(t0);
    manifest["results"] = std::move(results);
    write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
    res.artifacts.push_back("manifest.json");
    res.summary = std::move(summary);
    return res;
}

}  // namespace nct
