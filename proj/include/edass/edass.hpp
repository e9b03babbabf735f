#pragma once

// Convenience umbrella for the whole library.

#include "command_center.hpp"
#include "fusion.hpp"
#include "metrics.hpp"
#include "protocol.hpp"
#include "runner.hpp"
#include "scenario.hpp"
#include "sensing.hpp"
#include "sim.hpp"
#include "trace.hpp"
#include "util.hpp"
#include "world.hpp"
