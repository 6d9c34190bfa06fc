#pragma once

#include <string>

#include "core/model.hpp"

namespace fixtures {

// 45 degree beam on a 64 x 128 grid, linear, light absorption.
inline tiltprop::KeyValueDoc small_doc() {
  return {{"grid.dx", "0.1"},          {"grid.dy", "0.1"},
          {"grid.lx", "6.4"},          {"grid.ly", "12.8"},
          {"beam.angle_deg", "45"},    {"beam.epsilon", "0.05"},
          {"beam.speckles", "1:4:0.6:0"}, {"medium.nu0", "1e-3"},
          {"medium.nu1", "1e-3"},      {"layer.b", "0.1"},
          {"layer.beta", "50"}};
}

inline tiltprop::RunConfig small(const tiltprop::KeyValueDoc& overrides = {}) {
  return tiltprop::config_from_document(tiltprop::with_overrides(small_doc(), overrides));
}

inline const char* kReference =
    "grid.dx = 0.05\n"
    "grid.dy = 0.05\n"
    "grid.lx = 102.4\n"
    "grid.ly = 102.4\n"
    "beam.angle_deg = 45\n"
    "beam.epsilon = 0.05\n"
    "beam.speckles = 1:auto:2.5:0\n"
    "medium.mode = nonlinear\n"
    "medium.alpha = 0.05\n"
    "medium.nu0 = 5e-4\n"
    "medium.nu1 = 5e-4\n"
    "layer.b = 0.1\n"
    "layer.beta = 50\n";

}  // namespace fixtures
