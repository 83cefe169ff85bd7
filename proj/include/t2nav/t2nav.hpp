#pragma once

#include "t2nav/config.hpp"
#include "t2nav/core.hpp"
#include "t2nav/diagram_metrics.hpp"
#include "t2nav/io.hpp"
#include "t2nav/navsim/agent.hpp"
#include "t2nav/navsim/episode.hpp"
#include "t2nav/navsim/frontier.hpp"
#include "t2nav/navsim/sensing.hpp"
#include "t2nav/navsim/world.hpp"
#include "t2nav/term.hpp"
#include "t2nav/topology.hpp"
#include "t2nav/tslc.hpp"
