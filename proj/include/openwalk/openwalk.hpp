#ifndef OPENWALK_OPENWALK_HPP
#define OPENWALK_OPENWALK_HPP

#include "openwalk/agent.hpp"
#include "openwalk/config.hpp"
#include "openwalk/episode_log.hpp"
#include "openwalk/geometry.hpp"
#include "openwalk/harness.hpp"
#include "openwalk/perception.hpp"
#include "openwalk/planner.hpp"
#include "openwalk/plot.hpp"
#include "openwalk/scenarios.hpp"
#include "openwalk/sensors.hpp"
#include "openwalk/world.hpp"
#include "openwalk/world_io.hpp"

#endif  // OPENWALK_OPENWALK_HPP
