#include <math.h>
#include <stdio.h>
#include <string.h>

#include "mechlab.h"

#define EXPECT(cond)                                                  \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    MechlabMechanism *median = NULL;
    EXPECT(mechlab_mechanism_new("median", 3, 2.0, &median) == MECHLAB_STATUS_OK);
    EXPECT(mechlab_mechanism_dimension(median) == 3);

    const double agents[9] = {0, 1, -1, -1, 0, 1, 1, -1, 0};
    double w[3] = {9, 9, 9};
    EXPECT(mechlab_mechanism_evaluate(median, agents, 3, w) == MECHLAB_STATUS_OK);
    EXPECT(w[0] == 0.0 && w[1] == 0.0 && w[2] == 0.0);

    MechlabCheckOptions opts = mechlab_check_options_default();
    opts.num_profiles = 50;
    int32_t passed = -1;
    char *json = NULL;
    EXPECT(mechlab_check(median, "unanimity", &opts, &passed, &json) == MECHLAB_STATUS_OK);
    EXPECT(passed == 1);
    EXPECT(strstr(json, "\"verdict\": \"pass\"") != NULL);
    mechlab_string_free(json);
    mechlab_mechanism_free(median);

    MechlabMechanism *bad = NULL;
    EXPECT(mechlab_mechanism_new("c1:1,1", 3, 2.0, &bad) == MECHLAB_STATUS_UNSUPPORTED);
    EXPECT(bad == NULL);
    EXPECT(mechlab_last_error() != NULL);

    const double a[2] = {0, 0}, b[2] = {3, 4};
    double d = 0;
    EXPECT(mechlab_lp_distance(a, b, 2, 2.0, &d) == MECHLAB_STATUS_OK);
    EXPECT(fabs(d - 5.0) < 1e-15);

    puts("ok");
    return 0;
}
