#pragma once

#include <cstddef>
#include <vector>

#include "samsr/rng.hpp"
#include "samsr/training.hpp"

namespace samsr {

// Piecewise-constant scene: a background level plus a few axis-aligned
// rectangles, values in [0,1]. Pure in (seed, shape).
ImageTensor synthetic_scene(std::size_t channels, std::size_t size, const NoiseSeed& seed);

// n pairs of (x0, y) at size x size, where y is x0 block-averaged by `scale`
// and bicubic-upscaled back. Item i uses seed.child(i).
std::vector<TrainingPair> synthetic_pairs(std::size_t n, std::size_t channels, std::size_t size, std::size_t scale,
                                          const NoiseSeed& seed);

}  // namespace samsr
