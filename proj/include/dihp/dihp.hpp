#pragma once

#include "exact.hpp"
#include "rng.hpp"
#include "matching_space.hpp"
#include "omega_subset.hpp"
#include "distributions.hpp"
#include "globalness.hpp"
#include "protocol.hpp"
#include "fourier_omega.hpp"
#include "fourier_cube.hpp"
#include "streaming.hpp"
#include "experiments.hpp"
