#pragma once

#include "fiberqed/collective_modes.hpp"
#include "fiberqed/config.hpp"
#include "fiberqed/coupling_kernel.hpp"
#include "fiberqed/driven_steady_state.hpp"
#include "fiberqed/fiber_dispersion.hpp"
#include "fiberqed/observables.hpp"
#include "fiberqed/scenarios.hpp"
#include "fiberqed/sweep.hpp"
#include "fiberqed/table_io.hpp"
#include "fiberqed/version.hpp"
