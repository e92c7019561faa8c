#include <stdio.h>
#include "drainage.h"

int main(void) {
    DrainageModel *m = NULL;
    if (drainage_model_new(2, 0.5, 3, 0, &m) != DRAINAGE_STATUS_OK) return 1;
    DrainagePath *path = NULL;
    const int64_t start[2] = {0, 0};
    if (drainage_trace(m, start, 2, 100, &path) != DRAINAGE_STATUS_OK) return 2;
    int64_t last[2];
    size_t n = drainage_path_len(path);
    if (drainage_path_vertex(path, n - 1, last) != DRAINAGE_STATUS_OK) return 3;
    double g = 0.0;
    if (drainage_gamma_exact(0.5, &g) != DRAINAGE_STATUS_OK) return 4;
    printf("%zu %lld %lld %.6f\n", n, (long long)last[0], (long long)last[1], g);
    drainage_path_free(path);
    drainage_model_free(m);
    return 0;
}
