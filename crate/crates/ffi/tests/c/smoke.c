#include <math.h>
#include <stdio.h>
#include <string.h>

#include "polyzeta.h"

#define CHECK(cond)                                                        \
    do {                                                                   \
        if (!(cond)) {                                                     \
            const char *e = pz_last_error();                               \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond, \
                    e ? e : "no error");                                   \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    PzExpansion *h = NULL;
    CHECK(pz_compute(6, &h) == PZ_STATUS_OK);

    char *s = NULL;
    CHECK(pz_coefficient_string(h, 3, &s) == PZ_STATUS_OK);
    CHECK(strcmp(s, "(4*z(3))") == 0);
    pz_string_free(s);

    double ratio = 0, eig = 0;
    CHECK(pz_eval_expansion(h, 12, 3, 1, 128, &ratio, &eig) == PZ_STATUS_OK);
    CHECK(fabs(ratio - (1.0 + 4.0 * 1.2020569031595942854 / 1728.0)) < 1e-15);

    CHECK(pz_eval_expansion(h, 12, 9, 1, 128, &ratio, NULL) == PZ_STATUS_INVALID_ARGUMENT);
    CHECK(pz_last_error() != NULL);

    char *json = NULL;
    CHECK(pz_to_json(h, &json) == PZ_STATUS_OK);
    PzExpansion *h2 = NULL;
    CHECK(pz_from_json(json, &h2) == PZ_STATUS_OK);
    uint32_t w = 0;
    CHECK(pz_max_weight(h2, &w) == PZ_STATUS_OK && w == 6);
    pz_string_free(json);

    pz_expansion_free(h2);
    pz_expansion_free(h);
    printf("ok %s\n", pz_version());
    return 0;
}
