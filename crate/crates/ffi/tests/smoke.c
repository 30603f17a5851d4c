#include <math.h>
#include <stdio.h>

#include "azd_otto.h"

int main(void) {
    AzdSpectralModel *hot = NULL;
    AzdSpectralModel *cold = NULL;
    if (azd_lorentzian_new(1.0, 0.4, 2.0, 0.0005, 100.0, &hot) != AZD_OK) return 1;
    if (azd_lorentzian_new(1.0, 0.4, 2.0, 0.01, 80.0, &cold) != AZD_OK) return 1;

    double g = 0.0;
    if (azd_spectral_density(hot, 102.0, &g) != AZD_OK || fabs(g - 1.0) > 1e-12) return 2;

    AzdCycleParams p = {80.0, 100.0, 0.0005, 0.01, 1.0, 1.0, 1.75, 4.0, 1.0, 0.0015, 10000, AZD_MODE_MARKOVIAN};
    AzdCycleReport r;
    if (azd_run_limit_cycle(&p, hot, cold, NULL, &r) != AZD_OK) return 3;
    if (r.regime != AZD_REGIME_ENGINE || fabs(r.eta - 0.2) > 1e-9) return 4;

    AzdSpectralModel *bad = NULL;
    if (azd_lorentzian_new(1.0, 0.0, 2.0, 0.0005, 100.0, &bad) != AZD_ERR_INVALID) return 5;
    if (azd_last_error_message() == NULL) return 6;

    azd_spectral_model_free(hot);
    azd_spectral_model_free(cold);
    printf("ok %s\n", azd_version());
    return 0;
}
