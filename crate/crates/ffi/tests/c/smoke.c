#include <stdio.h>
#include <string.h>
#include "treechar.h"

int main(void) {
    TcGroup *g = NULL;
    if (tc_group_from_catalog("basilica", &g) != TC_STATUS_OK) return 10;
    char *v = NULL;
    if (tc_chi1(g, "a", &v) != TC_STATUS_OK) return 11;
    if (strcmp(v, "1/2") != 0) return 12;
    tc_string_free(v);
    if (tc_chi1(g, "zz", &v) != TC_STATUS_INPUT_ERROR) return 13;
    if (strlen(tc_last_error()) == 0) return 14;
    tc_group_free(g);

    if (tc_group_from_catalog("autfin3", &g) != TC_STATUS_OK) return 20;
    TcEstimate e;
    if (tc_psi(g, "spine(2,0)", "h_a", 2, TC_MODE_EXACT, 0, 0, &e) != TC_STATUS_OK) return 21;
    if (!e.exact || strcmp(e.value_text, "2/3") != 0 || e.bracket != TC_BRACKET_UPPER) return 22;
    tc_estimate_clear(&e);
    tc_group_free(g);
    printf("ok\n");
    return 0;
}
