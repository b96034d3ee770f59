#include <stdio.h>
#include <string.h>
#include "impvals.h"

int main(void) {
    ImpSession *s = NULL;
    if (imp_session_from_formula("x | y", &s) != IMP_STATUS_OK) {
        fprintf(stderr, "%s\n", imp_last_error());
        return 1;
    }
    char buf[32];
    size_t needed = 0;
    if (imp_value(s, "blame:exp", 0, buf, sizeof buf, &needed) != IMP_STATUS_OK) {
        return 2;
    }
    ImpStatus st = imp_value(s, "bogus", 0, buf, sizeof buf, &needed);
    imp_session_free(s);
    printf("%s %s\n", buf, imp_status_name(st));
    return 0;
}
