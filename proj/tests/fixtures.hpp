// Panels and synthetic fixtures shared by the unit and acceptance tests.

#pragma once

#include "tica/core.hpp"
#include "tica/synth.hpp"

#include <string>
#include <utility>
#include <vector>

namespace fixtures {

inline tica::SeriesMatrix panel(const tica::Matrix& values, tica::Timestamp start = 0) {
    tica::SeriesMatrix m;
    m.values = values;
    for (tica::Index t = 0; t < values.rows(); ++t) m.timestamps.push_back(start + t);
    for (tica::Index j = 0; j < values.cols(); ++j) m.labels.push_back("x" + std::to_string(j));
    return m;
}

/// Four mixed AR(1) latents with phi = 0.99, 0.9, 0.5, 0.0.
inline tica::SynthSpec four_scale(tica::Index length = 50000, std::uint64_t seed = 11) {
    tica::SynthSpec s;
    s.phis = {0.99, 0.9, 0.5, 0.0};
    s.length = length;
    s.seed = seed;
    s.mixing = tica::random_mixing(4, seed + 1);
    return s;
}

/// Two latents of equal autocorrelation 0.9; latent 0 has Student-t(3) noise.
inline tica::SynthSpec heavy_tail(tica::Index length = 50000, std::uint64_t seed = 21) {
    tica::SynthSpec s;
    s.phis = {0.9, 0.9, 0.3};
    s.innovations = {tica::Innovation::student_t(3.0), tica::Innovation::gaussian(),
                     tica::Innovation::gaussian()};
    s.length = length;
    s.seed = seed;
    s.mixing = tica::random_mixing(3, seed + 1);
    return s;
}

}  // namespace fixtures
