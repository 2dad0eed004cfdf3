#include "ican/rng.hpp"

#include <cmath>

#include "ican/constants.hpp"

namespace ican {

double Rng::normal() {
    // Box-Muller; u1 bounded away from 0 so log() stays finite.
    double u1 = uniform01();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

}  // namespace ican
