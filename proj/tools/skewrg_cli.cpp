// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "skewrg/skewrg.h"

namespace {

struct Options {
    std::string config, out, pair, mode;
    std::vector<std::string> rho;
    std::vector<std::pair<std::string, std::string>> kv;
};

int report_error(skewrg_status s) {
    std::fprintf(stderr, "skewrg: %s: %s\n", skewrg_status_name(s), skewrg_last_error());
    return s == SKEWRG_E_CONFIG || s == SKEWRG_E_ARGUMENT || s == SKEWRG_E_DOMAIN ? 2 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Renormalization of skew-product pairs and the critical almost Mathieu operator"};
    app.require_subcommand(1, 1);

    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {
        {"fixpoint", "locate E*, solve for the fixed point pair, check the commutator"},
        {"spectrum", "eigenvalues of the derivative at the fixed point"},
        {"butterfly", "bands and labelled gaps for p/q with q <= qmax, zoom boxes"},
        {"eigenfunction", "generalized eigenfunction orbit at E*"},
        {"recurrence", "Fibonacci-time renormalization of the AM pair"},
        {"selftest", "quick property checks"},
    };

    Options o;
    std::string N, qmax, lambda, zoom, nmax, gens, tol;
    for (const Sub& s : subs) {
        CLI::App* sc = app.add_subcommand(s.name, s.help);
        sc->add_option("--config", o.config, "key = value file, read before the flags")->check(CLI::ExistingFile);
        sc->add_option("--out", o.out, "output directory");
        sc->add_option("--rho", o.rho, "domain radii rho_F rho_G")->expected(2);
        sc->add_option("--N", N, "truncation degree");
        sc->add_option("--mode", o.mode, "plain or ball");
        sc->add_option("--tol", tol, "Newton residual target");
        sc->add_option("--qmax", qmax, "largest denominator");
        sc->add_option("--lambda", lambda, "coupling");
        sc->add_option("--zoom-generations", zoom, "zoom generations");
        sc->add_option("--nmax", nmax, "orbit length");
        sc->add_option("--generations", gens, "RG generations");
        sc->add_option("--pair", o.pair, "pair file for the spectrum");
    }
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "print only the verdict");

    CLI11_PARSE(app, argc, argv);
    std::string cmd = app.get_subcommands().front()->get_name();

    const std::pair<const char*, std::string*> flags[] = {{"N", &N},          {"solver_tol", &tol},  {"qmax", &qmax},
                                                          {"lambda", &lambda}, {"zoom_generations", &zoom},
                                                          {"nmax", &nmax},     {"generations", &gens}, {"out", &o.out},
                                                          {"pair", &o.pair},   {"mode", &o.mode}};
    skewrg_config* cfg = nullptr;
    skewrg_status st = skewrg_config_create(&cfg);
    if (st != SKEWRG_OK) return report_error(st);
    if (!o.config.empty() && (st = skewrg_config_load(cfg, o.config.c_str())) != SKEWRG_OK) {
        skewrg_config_destroy(cfg);
        return report_error(st);
    }
    for (auto& [key, val] : flags)
        if (!val->empty() && (st = skewrg_config_set(cfg, key, val->c_str())) != SKEWRG_OK) break;
    if (st == SKEWRG_OK && o.rho.size() == 2) {
        std::string r = o.rho[0] + " " + o.rho[1];
        st = skewrg_config_set(cfg, "rho", r.c_str());
    }
    if (st != SKEWRG_OK) {
        skewrg_config_destroy(cfg);
        return report_error(st);
    }

    skewrg_report* rep = nullptr;
    st = skewrg_run(cmd.c_str(), cfg, &rep);
    skewrg_config_destroy(cfg);
    if (st != SKEWRG_OK) return report_error(st);
    if (quiet)
        std::printf("%s %s\n", cmd.c_str(), skewrg_report_passed(rep) ? "passed" : "failed");
    else
        std::fputs(skewrg_report_summary(rep), stdout);
    int code = skewrg_report_passed(rep) ? 0 : 1;
    skewrg_report_destroy(rep);
    return code;
}
