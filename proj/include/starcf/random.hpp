// SPDX-License-Identifier: Apache-2.0
//
// starcf: downlink simulation and power allocation for STAR-RIS-assisted
// cell-free massive MIMO with multi-antenna users.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace starcf
{

// The standard distributions are implementation-defined; these are not, so a
// seed reproduces the same numbers with any standard library.
using Rng = std::mt19937_64;

/// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Rng &rng) { return double(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng &rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// CN(0, 1): real and imaginary parts are N(0, 1/2) (Box-Muller).
inline std::complex<double> complex_normal(Rng &rng)
{
    const double u1 = 1.0 - uniform01(rng); // (0, 1]
    const double u2 = uniform01(rng);
    const double r = std::sqrt(-std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(t), r * std::sin(t)};
}

/// N(0, 1).
inline double standard_normal(Rng &rng) { return std::sqrt(2.0) * complex_normal(rng).real(); }

inline Eigen::MatrixXcd complex_normal_matrix(Rng &rng, Eigen::Index rows, Eigen::Index cols)
{
    Eigen::MatrixXcd out(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            out(r, c) = complex_normal(rng);
    return out;
}

} // namespace starcf
