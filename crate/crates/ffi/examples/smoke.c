/* Minimal C client: runs b=01, reads the final state and a DJ verdict. */
#include <math.h>
#include <stdio.h>

#include "deutsch.h"

#define CHECK(call)                                                        \
  do {                                                                     \
    DeutschStatus st_ = (call);                                            \
    if (st_ != DEUTSCH_STATUS_OK) {                                        \
      fprintf(stderr, "%s failed (%d): %s\n", #call, (int)st_,             \
              deutsch_last_error_message());                               \
      return 1;                                                            \
    }                                                                      \
  } while (0)

int main(void) {
  DeutschTrace *trace = NULL;
  DeutschVerdict verdict;
  CHECK(deutsch_run("01", 0, &trace, &verdict));

  DeutschState *final_state = NULL;
  CHECK(deutsch_trace_stage(trace, 3, &final_state));

  double re[16], im[16];
  CHECK(deutsch_state_amplitudes(final_state, re, im, 16));
  double h = 1.0 / sqrt(2.0);
  if (fabs(re[6] - h) > 1e-12 || fabs(re[7] + h) > 1e-12) {
    fprintf(stderr, "unexpected amplitudes %g %g\n", re[6], re[7]);
    return 1;
  }

  const uint8_t f[4] = {0, 1, 1, 0};
  DeutschVerdict dj;
  CHECK(deutsch_jozsa(f, 4, &dj));

  const uint8_t bad[4] = {0, 0, 0, 1};
  DeutschVerdict ignored;
  if (deutsch_jozsa(bad, 4, &ignored) != DEUTSCH_STATUS_PROMISE_VIOLATION) {
    fprintf(stderr, "promise violation not reported\n");
    return 1;
  }

  printf("outcome=%u balanced=%d evaluations=%zu dj=%d\n", verdict.outcome_bit,
         verdict.classification == DEUTSCH_CLASS_BALANCED,
         (size_t)verdict.evaluations_used,
         dj.classification == DEUTSCH_CLASS_BALANCED);

  deutsch_state_free(final_state);
  deutsch_trace_free(trace);
  return 0;
}
