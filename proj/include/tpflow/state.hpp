#pragma once

#include "tpflow/fields.hpp"

namespace tpflow {

/// One time level of the coupled solution.
struct TimeState {
    int n = 0;
    double t = 0.0;
    NodalField S;
    NodalField Pw;
    NodalField Po;
};

}  // namespace tpflow
