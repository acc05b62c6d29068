#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace limitnls {

using Complex = std::complex<double>;

enum class FlowMode { defocusing, focusing };

inline int flow_sign(FlowMode m) { return m == FlowMode::defocusing ? +1 : -1; }

inline std::string flow_name(FlowMode m) {
    return m == FlowMode::defocusing ? "defocusing" : "focusing";
}

inline FlowMode flow_from_name(const std::string& s) {
    if (s == "defocusing") return FlowMode::defocusing;
    if (s == "focusing") return FlowMode::focusing;
    throw std::invalid_argument("unknown flow mode: " + s);
}

}  // namespace limitnls
