/* SPDX-License-Identifier: Apache-2.0 */
#ifndef SKEWRG_H
#define SKEWRG_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    SKEWRG_OK = 0,
    SKEWRG_E_ARGUMENT = 1, /* null pointer, bad size or out-of-range value */
    SKEWRG_E_CONFIG = 2,
    SKEWRG_E_IO = 3,
    SKEWRG_E_PARSE = 4,
    SKEWRG_E_DOMAIN = 5, /* radii or analyticity domain violated */
    SKEWRG_E_NUMERIC = 6,
    SKEWRG_E_INTERNAL = 7
} skewrg_status;

typedef struct skewrg_config skewrg_config;
typedef struct skewrg_report skewrg_report;
typedef struct skewrg_pair skewrg_pair;

/* message of the last failure on the calling thread, "" if none */
const char* skewrg_last_error(void);
const char* skewrg_status_name(skewrg_status s);

skewrg_status skewrg_config_create(skewrg_config** out);
void skewrg_config_destroy(skewrg_config* cfg);
skewrg_status skewrg_config_set(skewrg_config* cfg, const char* key, const char* value);
skewrg_status skewrg_config_load(skewrg_config* cfg, const char* path);

/* command is one of fixpoint, spectrum, butterfly, eigenfunction, recurrence, selftest */
skewrg_status skewrg_run(const char* command, const skewrg_config* cfg, skewrg_report** out);
const char* skewrg_report_json(const skewrg_report* r);
const char* skewrg_report_summary(const skewrg_report* r);
int skewrg_report_passed(const skewrg_report* r);
double skewrg_report_wall_time(const skewrg_report* r);
void skewrg_report_destroy(skewrg_report* r);

/* commuting pairs, stored in quad precision */
skewrg_status skewrg_pair_load(const char* path, skewrg_pair** out);
skewrg_status skewrg_pair_save(const skewrg_pair* p, const char* path);
/* self-dual almost Mathieu pair at coupling lambda and energy E */
skewrg_status skewrg_pair_am(double lambda, double E, int N, double rho_f, double rho_g, skewrg_pair** out);
/* one application of the normalized three-step operator; sigma may be NULL */
skewrg_status skewrg_pair_rg(const skewrg_pair* p, skewrg_pair** out, double* sigma);
skewrg_status skewrg_pair_distance(const skewrg_pair* a, const skewrg_pair* b, double* out);
int skewrg_pair_degree(const skewrg_pair* p);
void skewrg_pair_destroy(skewrg_pair* p);

skewrg_status skewrg_chambers(int p, int q, double lambda, double E, double* value, double* residual);
/* writes lo, hi of each band into edges (2 * count doubles); count is set even when cap is short */
skewrg_status skewrg_bands(int p, int q, double lambda, double* edges, size_t cap, size_t* count);
skewrg_status skewrg_rotation_number(double alpha, double lambda, double E, long steps, double* out);
skewrg_status skewrg_bootstrap(int N, double rho_f, double rho_g, double* estar);

#ifdef __cplusplus
}
#endif

#endif
