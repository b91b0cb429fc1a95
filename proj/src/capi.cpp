// SPDX-License-Identifier: Apache-2.0
#include "skewrg/skewrg.h"

#include <cmath>
#include <new>
#include <string>

#include "skewrg/am.hpp"
#include "skewrg/commands.hpp"
#include "skewrg/io.hpp"

struct skewrg_config {
    skewrg::Config cfg;
};
struct skewrg_report {
    skewrg::RunReport rep;
    std::string json, summary;
};
struct skewrg_pair {
    skewrg::Pair<skewrg::quad> p;
};

namespace {

thread_local std::string g_error;

skewrg_status fail(skewrg_status s, const std::string& msg) {
    g_error = msg;
    return s;
}

template <class F>
skewrg_status guard(F&& f) {
    g_error.clear();
    try {
        f();
        return SKEWRG_OK;
    } catch (const skewrg::ConfigError& e) {
        return fail(SKEWRG_E_CONFIG, e.what());
    } catch (const skewrg::IoError& e) {
        return fail(SKEWRG_E_IO, e.what());
    } catch (const skewrg::ParseError& e) {
        return fail(SKEWRG_E_PARSE, e.what());
    } catch (const skewrg::DomainError& e) {
        return fail(SKEWRG_E_DOMAIN, e.what());
    } catch (const skewrg::NumericError& e) {
        return fail(SKEWRG_E_NUMERIC, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(SKEWRG_E_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(SKEWRG_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SKEWRG_E_INTERNAL, e.what());
    }
}

#define REQUIRE(cond, what) \
    if (!(cond)) return fail(SKEWRG_E_ARGUMENT, what)

}  // namespace

extern "C" {

const char* skewrg_last_error(void) { return g_error.c_str(); }

const char* skewrg_status_name(skewrg_status s) {
    switch (s) {
        case SKEWRG_OK: return "ok";
        case SKEWRG_E_ARGUMENT: return "invalid argument";
        case SKEWRG_E_CONFIG: return "configuration error";
        case SKEWRG_E_IO: return "i/o error";
        case SKEWRG_E_PARSE: return "parse error";
        case SKEWRG_E_DOMAIN: return "domain error";
        case SKEWRG_E_NUMERIC: return "numeric error";
        case SKEWRG_E_INTERNAL: return "internal error";
    }
    return "unknown status";
}

skewrg_status skewrg_config_create(skewrg_config** out) {
    REQUIRE(out, "config_create: out is null");
    return guard([&] { *out = new skewrg_config(); });
}

void skewrg_config_destroy(skewrg_config* cfg) { delete cfg; }

skewrg_status skewrg_config_set(skewrg_config* cfg, const char* key, const char* value) {
    REQUIRE(cfg && key && value, "config_set: null argument");
    return guard([&] { cfg->cfg.set(key, value); });
}

skewrg_status skewrg_config_load(skewrg_config* cfg, const char* path) {
    REQUIRE(cfg && path, "config_load: null argument");
    return guard([&] { cfg->cfg.load(path); });
}

skewrg_status skewrg_run(const char* command, const skewrg_config* cfg, skewrg_report** out) {
    REQUIRE(command && cfg && out, "run: null argument");
    *out = nullptr;
    return guard([&] {
        auto* r = new skewrg_report();
        try {
            r->rep = skewrg::run_command(command, cfg->cfg);
            r->json = r->rep.to_json();
            r->summary = r->rep.summary();
        } catch (...) {
            delete r;
            throw;
        }
        *out = r;
    });
}

const char* skewrg_report_json(const skewrg_report* r) { return r ? r->json.c_str() : ""; }
const char* skewrg_report_summary(const skewrg_report* r) { return r ? r->summary.c_str() : ""; }
int skewrg_report_passed(const skewrg_report* r) { return r && r->rep.passed() ? 1 : 0; }
double skewrg_report_wall_time(const skewrg_report* r) { return r ? r->rep.wall_time : 0.0; }
void skewrg_report_destroy(skewrg_report* r) { delete r; }

skewrg_status skewrg_pair_load(const char* path, skewrg_pair** out) {
    REQUIRE(path && out, "pair_load: null argument");
    return guard([&] { *out = new skewrg_pair{skewrg::load_pair(path)}; });
}

skewrg_status skewrg_pair_save(const skewrg_pair* p, const char* path) {
    REQUIRE(p && path, "pair_save: null argument");
    return guard([&] { skewrg::save_pair(path, p->p); });
}

skewrg_status skewrg_pair_am(double lambda, double E, int N, double rho_f, double rho_g, skewrg_pair** out) {
    REQUIRE(out, "pair_am: out is null");
    REQUIRE(N >= 1 && N <= 400, "pair_am: degree must lie in [1, 400]");
    REQUIRE(rho_f > 0 && rho_g > 0 && std::isfinite(lambda) && std::isfinite(E), "pair_am: bad parameters");
    return guard([&] {
        using skewrg::quad;
        quad a = skewrg::golden<quad>();
        *out = new skewrg_pair{skewrg::am_pair<quad>(quad(lambda), quad(E), a / 2, a, N, rho_f, rho_g)};
    });
}

skewrg_status skewrg_pair_rg(const skewrg_pair* p, skewrg_pair** out, double* sigma) {
    REQUIRE(p && out, "pair_rg: null argument");
    return guard([&] {
        auto r = skewrg::rg_full(p->p);
        *out = new skewrg_pair{r.pair};
        if (sigma) *sigma = double(r.sigma);
    });
}

skewrg_status skewrg_pair_distance(const skewrg_pair* a, const skewrg_pair* b, double* out) {
    REQUIRE(a && b && out, "pair_distance: null argument");
    return guard([&] { *out = double(skewrg::pair_norm(skewrg::pair_sub(a->p, b->p))); });
}

int skewrg_pair_degree(const skewrg_pair* p) { return p ? p->p.degree() : -1; }
void skewrg_pair_destroy(skewrg_pair* p) { delete p; }

skewrg_status skewrg_chambers(int p, int q, double lambda, double E, double* value, double* residual) {
    REQUIRE(q >= 1 && value, "chambers: q must be positive and value non-null");
    return guard([&] {
        auto r = skewrg::chambers_trace(p, q, lambda, E);
        *value = r.value;
        if (residual) *residual = r.residual;
    });
}

skewrg_status skewrg_bands(int p, int q, double lambda, double* edges, size_t cap, size_t* count) {
    REQUIRE(q >= 1 && count && (edges || cap == 0), "bands: bad arguments");
    return guard([&] {
        auto b = skewrg::spectrum_bands(p, q, lambda);
        *count = b.size();
        for (size_t i = 0; i < b.size() && i < cap; ++i) {
            edges[2 * i] = b[i].lo;
            edges[2 * i + 1] = b[i].hi;
        }
    });
}

skewrg_status skewrg_rotation_number(double alpha, double lambda, double E, long steps, double* out) {
    REQUIRE(out && steps > 0, "rotation_number: bad arguments");
    return guard([&] {
        skewrg::AMParams prm;
        prm.alpha = alpha;
        prm.lambda = lambda;
        prm.E = E;
        *out = skewrg::rotation_number(prm, steps);
    });
}

skewrg_status skewrg_bootstrap(int N, double rho_f, double rho_g, double* estar) {
    REQUIRE(estar && N >= 8, "bootstrap: bad arguments");
    return guard([&] {
        if (auto v = skewrg::single_domain_violation(rho_f, rho_g)) throw skewrg::DomainError(*v);
        skewrg::BootstrapOptions o;
        o.N = N;
        o.rho_f = rho_f;
        o.rho_g = rho_g;
        *estar = skewrg::bootstrap_Estar(o).Estar;
    });
}

}  // extern "C"
