/* Exercises the C interface from plain C. */
#include "fountain.h"

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                   \
    do {                                                               \
        if (!(cond)) {                                                 \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            ++failures;                                                \
        }                                                              \
    } while (0)

static void dist_handles(void)
{
    fc_dist* d = NULL;
    double mean = 0;
    char* text = NULL;
    EXPECT(fc_dist_parse("{\"name\":\"r10\"}", &d) == FC_OK);
    EXPECT(fc_dist_mean(d, &mean) == FC_OK);
    EXPECT(fabs(mean - 4.6314) < 1e-4);
    EXPECT(fc_dist_text(d, &text) == FC_OK);
    EXPECT(strncmp(text, "1 0.00976", 9) == 0);
    fc_free(text);
    fc_dist_free(d);

    EXPECT(fc_dist_parse("1 0.5\n2 0.5\n", &d) == FC_OK);
    EXPECT(fc_dist_mean(d, &mean) == FC_OK && mean == 1.5);
    fc_dist_free(d);

    d = (fc_dist*)0x1;
    EXPECT(fc_dist_parse("2 0.5\n1 0.5\n", &d) == FC_ERR_PARSE);
    EXPECT(d == NULL);
    EXPECT(strlen(fc_last_error()) > 0);
    EXPECT(fc_dist_parse(NULL, &d) == FC_ERR_INVALID_ARGUMENT);
    EXPECT(fc_dist_mean(NULL, &mean) == FC_ERR_INVALID_ARGUMENT);
    fc_dist_free(NULL);
}

static void codec(void)
{
    enum { K = 30, T = 8, N = 60 };
    fc_codec* c = NULL;
    unsigned char src[K * T], enc[N * T], back[K * T], rx[N * T];
    uint32_t idx[N];
    size_t k = 0, t = 0, m = 0, y = 0;
    EXPECT(fc_codec_create("{\"code\":\"raptor\",\"k\":30,\"symbol_size\":8,\"seed\":5}", &c) == FC_OK);
    EXPECT(fc_codec_info(c, &k, &t) == FC_OK && k == K && t == T);
    for (size_t i = 0; i < sizeof src; ++i)
        src[i] = (unsigned char)(i * 37 + 1);
    EXPECT(fc_codec_encode(c, src, N, enc) == FC_OK);
    EXPECT(memcmp(enc, src, sizeof src) == 0); /* systematic */
    for (uint32_t i = 0; i < N; ++i)
        if (i % 4 != 1) {
            idx[m] = i;
            memcpy(rx + m * T, enc + i * T, T);
            ++m;
        }
    EXPECT(fc_codec_decode(c, idx, rx, m, back, &y) == FC_OK);
    EXPECT(memcmp(back, src, sizeof src) == 0);
    EXPECT(fc_codec_decode(c, idx, rx, 10, back, &y) == FC_ERR_DECODE);
    fc_codec_free(c);
    EXPECT(fc_codec_create("{\"code\":\"raptor\",\"symbol_size\":8}", &c) == FC_ERR_PARSE);
}

static void tables(void)
{
    char* tsv = NULL;
    EXPECT(fc_bounds("{\"kind\":\"lrfc\",\"lo\":0,\"hi\":2}", &tsv) == FC_OK);
    EXPECT(tsv[0] == '#');
    EXPECT(strstr(tsv, "delta\tlower\tupper\n0\t0.5\t1\n") != NULL);
    fc_free(tsv);
    EXPECT(fc_bounds("{\"kind\":\"lrfc\",\"extra\":true}", &tsv) == FC_ERR_PARSE);
    EXPECT(fc_bounds("not json", &tsv) == FC_ERR_PARSE);
    EXPECT(fc_analyze("{\"method\":\"dp\",\"k\":1,\"dist\":{\"name\":\"point\",\"d\":1}}", &tsv) == FC_OK);
    EXPECT(strstr(tsv, "\n1\t0\t0\n") != NULL);
    fc_free(tsv);
    EXPECT(fc_simulate("{\"code\":{\"kind\":\"lrfc\",\"k\":4},\"grid\":[0],\"seed\":3,"
                       "\"stop\":{\"max_trials\":100,\"target_failures\":100}}",
                       &tsv) == FC_OK);
    EXPECT(strstr(tsv, "\n0\t100\t") != NULL);
    fc_free(tsv);
    EXPECT(fc_spectra("{\"kind\":\"enumerator\",\"t\":3}", &tsv) == FC_OK);
    fc_free(tsv);
}

static void design(void)
{
    char *dist = NULL, *traj = NULL, *summary = NULL;
    /* Omega-bar <= 2 keeps the LT lower bound near 1: reported as infeasible, outputs still filled. */
    fc_status s = fc_design("{\"spec\":{\"k\":200,\"mean_max\":2,\"dmax\":8,\"schedule\":{\"sweeps\":3}}}", &dist, &traj,
                            &summary);
    EXPECT(s == FC_ERR_INFEASIBLE);
    EXPECT(dist && traj && summary);
    EXPECT(summary && strstr(summary, "\"feasible\":false") != NULL);
    fc_free(dist);
    fc_free(traj);
    fc_free(summary);
}

int main(void)
{
    EXPECT(strlen(fc_version()) > 0);
    dist_handles();
    codec();
    tables();
    design();
    if (failures)
        fprintf(stderr, "%d failure(s)\n", failures);
    else
        printf("capi: all checks passed\n");
    return failures != 0;
}
