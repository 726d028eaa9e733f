#pragma once

// Umbrella header for the vrths library.

#include "vrths/actuator.hpp"
#include "vrths/building.hpp"
#include "vrths/config.hpp"
#include "vrths/controller.hpp"
#include "vrths/degradation.hpp"
#include "vrths/engine.hpp"
#include "vrths/errors.hpp"
#include "vrths/ground_motion.hpp"
#include "vrths/io.hpp"
#include "vrths/isolator.hpp"
#include "vrths/load_cell.hpp"
#include "vrths/metrics.hpp"
#include "vrths/reliability.hpp"
#include "vrths/rng.hpp"
#include "vrths/spectral.hpp"
#include "vrths/weibull.hpp"
