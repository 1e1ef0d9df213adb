#pragma once

#include "ppf/protocol.hpp"

namespace ppf {

// Unary counter: states 0..2^n, computes x >= 2^n.
Protocol fixture_pn(int n);
// Binary counter: states 0, 2^0..2^n, computes x >= 2^n.
Protocol fixture_ppn(int n);

}  // namespace ppf
