#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "nct.h"

TEST_CASE("status strings and error slot") {
    CHECK(std::strlen(nct_version()) > 0);
    CHECK(nct_last_error()[0] == '\0');
    nct_torus* t = nullptr;
    CHECK(nct_torus_new(4, 2, &t) == NCT_ERR_PARAM);
    CHECK(std::strlen(nct_last_error()) > 0);
    CHECK(nct_torus_new(4, 1, &t) == NCT_OK);
    CHECK(nct_last_error()[0] == '\0');  // success clears the slot
    nct_torus_free(t);
}

TEST_CASE("null-argument discipline") {
    CHECK(nct_torus_new(4, 1, nullptr) == NCT_ERR_PARAM);
    CHECK(nct_element_weyl(nullptr, 0, 0, nullptr) == NCT_ERR_PARAM);
    CHECK(nct_run_config_json(nullptr, nullptr, nullptr, 0) == NCT_ERR_PARAM);
    CHECK(nct_mk_distance(nullptr, nullptr, nullptr, 1, 1, 0, nullptr) ==
          NCT_ERR_PARAM);
    nct_torus_free(nullptr);
    nct_element_free(nullptr);
    nct_lip_free(nullptr);
    nct_state_free(nullptr);
}

TEST_CASE("handle lifecycle and metric calls through the shared interface") {
    nct_torus* t = nullptr;
    REQUIRE(nct_torus_new(2, 1, &t) == NCT_OK);
    CHECK(nct_torus_q(t) == 2);

    nct_element* u = nullptr;
    nct_element* one = nullptr;
    REQUIRE(nct_element_weyl(t, 1, 0, &u) == NCT_OK);
    REQUIRE(nct_element_weyl(t, 0, 0, &one) == NCT_OK);
    double nrm = -1.0;
    CHECK(nct_element_op_norm(u, &nrm) == NCT_OK);
    CHECK(std::abs(nrm - 1.0) < 1e-12);
    CHECK(nct_element_weyl(t, 5, 0, &u) == NCT_ERR_PARAM);

    nct_lip* l = nullptr;
    REQUIRE(nct_lip_flat(t, &l) == NCT_OK);
    double v = -1.0;
    CHECK(nct_lip_eval(l, one, &v) == NCT_OK);
    CHECK(std::abs(v) < 1e-14);
    double gap = 0.0;
    CHECK(nct_lip_kernel_gap(l, &gap) == NCT_OK);
    CHECK(std::abs(gap - 2.0) < 1e-10);

    nct_element* h = nullptr;
    REQUIRE(nct_element_random_hermitian(t, 99, 2, &h) == NCT_OK);
    nct_lip* l2 = nullptr;
    REQUIRE(nct_lip_scaled(l, 2.0, &l2) == NCT_OK);
    double v1 = 0.0, v2 = 0.0;
    CHECK(nct_lip_eval(l, h, &v1) == NCT_OK);
    CHECK(nct_lip_eval(l2, h, &v2) == NCT_OK);
    CHECK(v2 == 2.0 * v1);

    nct_state* phi = nullptr;
    nct_state* psi = nullptr;
    REQUIRE(nct_state_random(2, 11, &phi) == NCT_OK);
    REQUIRE(nct_state_random(2, 12, &psi) == NCT_OK);
    double dist = -1.0, self = -1.0, diam = 0.0;
    CHECK(nct_mk_distance(l, phi, psi, 16, 150, 77, &dist) == NCT_OK);
    CHECK(dist > 0.0);
    CHECK(nct_mk_distance(l, phi, phi, 16, 150, 77, &self) == NCT_OK);
    CHECK(self == 0.0);
    CHECK(nct_diameter(l, 5, &diam) == NCT_OK);
    CHECK(diam >= dist - 1e-9);
    CHECK(std::abs(diam - 2.0) < 1e-6);

    nct_state_free(phi);
    nct_state_free(psi);
    nct_lip_free(l2);
    nct_lip_free(l);
    nct_element_free(h);
    nct_element_free(u);
    nct_element_free(one);
    nct_torus_free(t);
}

TEST_CASE("config runner maps outcomes onto the exit contract") {
    namespace fs = std::filesystem;
    const fs::path out = fs::temp_directory_path() / "nct_tests" / "capi_run";
    fs::remove_all(out);
    char summary[256] = {0};
    const std::string cfg =
        "{\"mode\":\"sandwich\",\"q\":3,\"samples\":2,\"seed\":3}";
    CHECK(nct_run_config_json(cfg.c_str(), out.string().c_str(), summary,
                              sizeof summary) == NCT_OK);
    CHECK(std::string(summary).find("sandwich") != std::string::npos);
    CHECK(fs::exists(out / "results.csv"));
    CHECK(fs::exists(out / "manifest.json"));

    CHECK(nct_run_config_json("{\"mode\":\"bogus\"}", nullptr, summary,
                              sizeof summary) == NCT_ERR_CONFIG);
    CHECK(nct_run_config_json("{\"mode\":\"axioms\",\"q\":9}", nullptr,
                              summary, sizeof summary) == NCT_ERR_CONFIG);
    CHECK(nct_run_config_json("{broken", nullptr, summary, sizeof summary) ==
          NCT_ERR_CONFIG);
    CHECK(nct_run_config_json(
              "{\"mode\":\"sandwich\",\"q\":2,\"samples\":1,"
              "\"out\":\"/proc/nct_forbidden/x\"}",
              nullptr, summary, sizeof summary) == NCT_ERR_RUNTIME);
    CHECK(std::strlen(nct_last_error()) > 0);

    // tiny summary buffers are truncated, never overrun
    char tiny[8] = {0};
    CHECK(nct_run_config_json(cfg.c_str(), out.string().c_str(), tiny,
                              sizeof tiny) == NCT_OK);
    CHECK(std::strlen(tiny) < sizeof tiny);
}
