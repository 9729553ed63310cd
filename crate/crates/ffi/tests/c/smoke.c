#include <math.h>
#include <stdio.h>
#include "tsvd.h"

#define CHECK(call)                                                        \
  do {                                                                     \
    TsvdStatus st_ = (call);                                               \
    if (st_ != TSVD_STATUS_OK) {                                           \
      const char *m_ = tsvd_last_error();                                  \
      fprintf(stderr, "%s -> %d: %s\n", #call, (int)st_, m_ ? m_ : "?");   \
      return 1;                                                            \
    }                                                                      \
  } while (0)

int main(void) {
  size_t dims[3] = {2, 2, 3};
  double data[12];
  for (int i = 0; i < 12; ++i) data[i] = (double)(i + 1);

  TsvdTensor *a = NULL, *id = NULL, *p = NULL;
  CHECK(tsvd_tensor_new(dims, 3, data, 12, &a));
  CHECK(tsvd_tensor_identity(2, 3, &id));
  CHECK(tsvd_t_product(a, id, &p));

  double back[12];
  CHECK(tsvd_tensor_copy_data(p, back, 12));
  for (int i = 0; i < 12; ++i) {
    if (fabs(back[i] - data[i]) > 1e-12) {
      fprintf(stderr, "A * I differs at %d\n", i);
      return 1;
    }
  }

  double tnn = 0.0;
  CHECK(tsvd_tnn(a, &tnn));
  if (!(tnn > 0.0)) return 1;

  size_t small[1];
  if (tsvd_tensor_dims(a, small, 1) != TSVD_STATUS_BUFFER_TOO_SMALL) return 1;
  if (tsvd_last_error() == NULL) return 1;

  tsvd_tensor_free(p);
  tsvd_tensor_free(id);
  tsvd_tensor_free(a);
  tsvd_tensor_free(NULL);
  printf("c smoke ok\n");
  return 0;
}
