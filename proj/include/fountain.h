/* C interface to the fountain code library. */
#ifndef FOUNTAIN_H
#define FOUNTAIN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define FC_API __declspec(dllexport)
#else
#define FC_API __attribute__((visibility("default")))
#endif

typedef enum fc_status {
    FC_OK = 0,
    FC_ERR_INVALID_ARGUMENT = 1,
    FC_ERR_DOMAIN = 2,
    FC_ERR_CONSTRUCTION = 3,
    FC_ERR_PARSE = 4,
    FC_ERR_INFEASIBLE = 5,
    FC_ERR_DECODE = 6,
    FC_ERR_INTERNAL = 7
} fc_status;

FC_API const char* fc_version(void);
/* Message for the last failing call on this thread; never NULL. */
FC_API const char* fc_last_error(void);
/* Frees strings returned through char** out-parameters. */
FC_API void fc_free(char* s);

/* Degree distributions. spec is JSON (see README) or the two-column text format. */
typedef struct fc_dist fc_dist;
FC_API fc_status fc_dist_parse(const char* spec, fc_dist** out);
FC_API fc_status fc_dist_mean(const fc_dist* d, double* out);
FC_API fc_status fc_dist_text(const fc_dist* d, char** out);
FC_API void fc_dist_free(fc_dist* d);

/* Systematic LT or Raptor codec over GF(2); symbols are byte strings of a fixed size. */
typedef struct fc_codec fc_codec;
FC_API fc_status fc_codec_create(const char* config_json, fc_codec** out);
FC_API fc_status fc_codec_info(const fc_codec* c, size_t* k, size_t* symbol_size);
/* src: k*symbol_size bytes. out: n*symbol_size bytes, output i in row i. */
FC_API fc_status fc_codec_encode(const fc_codec* c, const unsigned char* src, size_t n, unsigned char* out);
/* Received symbols with their output indices. out: k*symbol_size bytes. FC_ERR_DECODE when rank deficient. */
FC_API fc_status fc_codec_decode(const fc_codec* c, const uint32_t* indices, const unsigned char* symbols,
                                 size_t count, unsigned char* out, size_t* inactivations);
FC_API void fc_codec_free(fc_codec* c);

/* JSON request in, TSV out. Every TSV starts with a '#' line holding the resolved request. */
FC_API fc_status fc_simulate(const char* plan_json, char** tsv);
FC_API fc_status fc_analyze(const char* request_json, char** tsv);
FC_API fc_status fc_bounds(const char* request_json, char** tsv);
FC_API fc_status fc_spectra(const char* request_json, char** tsv);
/* FC_ERR_INFEASIBLE is returned together with the outputs when the target is not met. */
FC_API fc_status fc_design(const char* request_json, char** dist_text, char** trajectory_tsv, char** summary_json);

#ifdef __cplusplus
}
#endif

#endif
