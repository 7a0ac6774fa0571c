#pragma once

#include "seqscreen/families.hpp"
#include "seqscreen/model.hpp"

#include <string>

namespace testing {

inline seqscreen::ScreeningModel uniform_additive(seqscreen::NoiseFamily noise, double lo = 0.0, double hi = 1.0,
                                                  double scale = 1.0) {
    return {seqscreen::make_uniform_signal(lo, hi), seqscreen::make_additive_noise_kernel(noise, scale)};
}

inline seqscreen::ScreeningModel uniform_logistic() { return uniform_additive(seqscreen::NoiseFamily::Logistic); }

inline seqscreen::ScreeningModel uniform_power(double lo = 1.0, double hi = 2.0) {
    return {seqscreen::make_uniform_signal(lo, hi), seqscreen::make_power_kernel()};
}

inline seqscreen::ScreeningModel uniform_exp_tilt() {
    return {seqscreen::make_uniform_signal(0.0, 1.0), seqscreen::make_exp_tilt_kernel()};
}

inline std::string model_path(const std::string& name) { return std::string(SEQSCREEN_MODELS_DIR) + "/" + name; }

}  // namespace testing
