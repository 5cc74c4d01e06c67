/* Compiled as C: the public header must stay valid C99. */
#include <stddef.h>

#include "leveralign/leveralign.h"

/* Solves a two-pair problem through the header from C; returns the status. */
int c_header_check_solve(double c_out[9]) {
  const double alpha[6] = {0.0, 1.0, 0.0, -1.0, 0.0, 0.0};
  const double beta[6] = {1.0, 0.0, 0.0, 0.0, 1.0, 0.0};
  return (int)la_solve_attitude(alpha, beta, NULL, 2, c_out, NULL);
}
