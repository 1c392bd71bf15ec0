#pragma once

// Umbrella header: quantization of a vector into few distinct values,
// posed as sparse least squares over a lower-triangular step basis.

#include "vq/bench.hpp"
#include "vq/clustering.hpp"
#include "vq/core.hpp"
#include "vq/eval.hpp"
#include "vq/io.hpp"
#include "vq/quantizers.hpp"
#include "vq/rng.hpp"
#include "vq/solvers.hpp"
