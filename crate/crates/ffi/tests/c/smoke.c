#include <stdio.h>
#include <string.h>
#include "chiralflow.h"

#define CHECK(x) do { if (!(x)) { fprintf(stderr, "failed: %s\n", #x); return 1; } } while (0)

int main(void) {
    CfCurrents *cs = NULL;
    CfState *vac = NULL, *img = NULL, *back = NULL;
    char *text = NULL;

    CHECK(cf_currents_new(2, &cs) == CF_STATUS_OK);
    CHECK(cf_state_parse("1 |0>", 2, &vac) == CF_STATUS_OK);
    CHECK(cf_sigma_apply(cs, vac, &img) == CF_STATUS_OK);
    CHECK(cf_tau_apply(cs, img, &back) == CF_STATUS_OK);
    CHECK(cf_state_format(back, &text) == CF_STATUS_OK);
    CHECK(strcmp(text, "1 |0>") == 0);
    cf_string_free(text);

    CHECK(cf_state_parse("1 c[9,-1] |0>", 2, &img) == CF_STATUS_INDEX_OUT_OF_RANGE);
    text = cf_last_error();
    CHECK(text != NULL);
    cf_string_free(text);

    cf_state_free(vac);
    cf_state_free(back);
    cf_currents_free(cs);
    printf("ok\n");
    return 0;
}
