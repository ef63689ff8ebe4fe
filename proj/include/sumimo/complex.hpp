#pragma once

#include <complex>

namespace sumimo {

using Complex = std::complex<double>;

}  // namespace sumimo
