#include <stdio.h>
#include <string.h>

#include "prodrec.h"

int main(int argc, char **argv) {
    if (argc != 3) {
        fprintf(stderr, "usage: smoke TRANSACTIONS RATINGS\n");
        return 64;
    }
    ProdrecDataset *ds = NULL;
    if (prodrec_dataset_load(argv[1], argv[2], &ds) != PRODREC_STATUS_OK) {
        fprintf(stderr, "load: %s\n", prodrec_last_error_message());
        return 1;
    }
    ProdrecConfig cfg = prodrec_config_default();
    cfg.top_n = 3;
    ProdrecRecommendations *recs = NULL;
    if (prodrec_recommend(ds, "User3", &cfg, &recs) != PRODREC_STATUS_OK) {
        fprintf(stderr, "recommend: %s\n", prodrec_last_error_message());
        return 1;
    }
    for (size_t i = 0; i < prodrec_recommendations_len(recs); i++) {
        printf("%s %.4f %d %s\n", prodrec_recommendations_item(recs, i),
               prodrec_recommendations_score(recs, i),
               (int)prodrec_recommendations_source(recs, i),
               prodrec_recommendations_explain(recs, i));
    }
    prodrec_recommendations_free(recs);

    if (prodrec_recommend(ds, "nobody", &cfg, &recs) != PRODREC_STATUS_NOT_FOUND || recs != NULL) {
        return 1;
    }
    printf("error: %s\n", prodrec_last_error_message());
    prodrec_dataset_free(ds);
    return 0;
}
