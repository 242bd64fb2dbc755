#pragma once

// Umbrella header.
#include "multigen/dynamics.hpp"
#include "multigen/frame.hpp"
#include "multigen/geometry.hpp"
#include "multigen/level_gen.hpp"
#include "multigen/map_io.hpp"
#include "multigen/map_validation.hpp"
#include "multigen/metrics.hpp"
#include "multigen/observation.hpp"
#include "multigen/protocol.hpp"
#include "multigen/replay.hpp"
#include "multigen/session.hpp"
#include "multigen/world.hpp"
#include "multigen/script.hpp"
