#include "ctfsim/device_model.hpp"

namespace ctfsim {

// Output of `ctf_sim calibrate` with the default anchors; mirrors
// data/default_params.yaml.
ModelParams default_params() {
  ModelParams p;
  p.tau_trap = 6.5130923473511623e-07;
  p.tau_detrap = 1e-4;
  p.u_c = 0.95358580569302576;
  p.A = 0.1867674235744452;
  p.t0 = 1e-6;
  p.VT0 = -1.2;
  p.VT_max = 3.0;
  p.bo_scale = 1.0;
  p.to_sens = 0.0;
  p.ctl_sens = 0.0;
  p.detrap_width_exp = 1.5;
  return p;
}

}  // namespace ctfsim
