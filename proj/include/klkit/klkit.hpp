// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "klkit/counterexamples.hpp"
#include "klkit/diagnostics.hpp"
#include "klkit/eigensolve.hpp"
#include "klkit/expansion.hpp"
#include "klkit/grid.hpp"
#include "klkit/io.hpp"
#include "klkit/kernels.hpp"
#include "klkit/matrix.hpp"
#include "klkit/rng.hpp"
#include "klkit/sampling.hpp"
#include "klkit/spectrum.hpp"
