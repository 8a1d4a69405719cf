#include "pathprox/pathprox.h"

int main(void) {
  double v = 0.0, w = 0.0;
  const double y = 1.0;
  pp_status s = pp_prox_single(1.0, &y, 1, 0.5, &v, &w);
  return s == PP_OK && v > 0.66 && v < 0.67 ? 0 : 1;
}
