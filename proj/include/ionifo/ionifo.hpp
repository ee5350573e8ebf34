#pragma once

// Umbrella header for the driven trapped-ion interferometer library.

#include "ionifo/constants.hpp"
#include "ionifo/errors.hpp"
#include "ionifo/config.hpp"
#include "ionifo/quadrature.hpp"
#include "ionifo/linalg.hpp"
#include "ionifo/trajectory.hpp"
#include "ionifo/dynamics.hpp"
#include "ionifo/phases.hpp"
#include "ionifo/overlap.hpp"
#include "ionifo/fft.hpp"
#include "ionifo/tdse.hpp"
#include "ionifo/interferometer.hpp"
#include "ionifo/verify.hpp"
