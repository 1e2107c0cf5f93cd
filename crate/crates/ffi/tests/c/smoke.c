#include <stdio.h>
#include <string.h>
#include "linunion.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s (line %d)\n", #cond, __LINE__); return 1; } } while (0)

int main(void) {
    LuFamily *f = NULL;
    size_t n = 0, u = 0, w = 0, len = 0;
    CHECK(lu_generate_random_discs(20, 7, &f) == LU_STATUS_OK);
    CHECK(lu_family_len(f, &n) == LU_STATUS_OK && n == 20);
    CHECK(lu_union_complexity(f, &u) == LU_STATUS_OK);
    CHECK(lu_clique_number(f, &w) == LU_STATUS_OK && w >= 1);
    CHECK(lu_depth_profile(f, NULL, 0, &len) == LU_STATUS_BUFFER_TOO_SMALL);
    size_t buf[512];
    CHECK(len <= 512 && lu_depth_profile(f, buf, 512, &len) == LU_STATUS_OK);
    CHECK(len < 3 || buf[2] == u);
    char *json = NULL;
    CHECK(lu_analyze_json(f, 6.0, &json) == LU_STATUS_OK && strstr(json, "\"omega\"") != NULL);
    lu_string_free(json);
    lu_family_free(f);

    CHECK(lu_generate_lines_parabolas(6, 2, &f) == LU_STATUS_OK);
    LuCertificate cert;
    CHECK(lu_charge_certificate(f, 2, &cert) == LU_STATUS_OK && cert.pass == 1);
    CHECK(lu_charge_certificate(f, 9, &cert) == LU_STATUS_PARAMETER);
    CHECK(lu_last_error() != NULL);
    lu_family_free(f);
    printf("ok union=%zu omega=%zu\n", u, w);
    return 0;
}
