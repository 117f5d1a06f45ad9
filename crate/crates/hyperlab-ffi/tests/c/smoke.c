#include <math.h>
#include <stdio.h>
#include "hyperlab.h"

int main(void) {
    double v = 0.0;
    if (hl_bilaplacian_rho_squared(3, 0.7, &v) != HL_STATUS_OK || fabs(v - 8.0) > 1e-12) {
        return 1;
    }
    HlKinematics k;
    if (hl_moving_center_kinematics(1.0, 0.3, 4.0, 0.5, &k) != HL_STATUS_OK || !(k.rho > 0.0)) {
        return 2;
    }
    if (hl_bilaplacian_rho_squared(1, 0.7, &v) == HL_STATUS_OK) {
        return 3;
    }
    char msg[256];
    if (hl_last_error_message(msg, sizeof msg) == 0) {
        return 4;
    }
    HlConfig *cfg = NULL;
    if (hl_config_new("no-such-suite", &cfg) != HL_STATUS_CONFIG || cfg != NULL) {
        return 5;
    }
    printf("%s %.3f\n", hl_version(), v);
    return 0;
}
