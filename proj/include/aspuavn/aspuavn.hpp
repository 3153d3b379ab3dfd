#pragma once

#include "adversary.hpp"
#include "agents.hpp"
#include "analysis.hpp"
#include "domain.hpp"
#include "engine.hpp"
#include "experiment.hpp"
#include "fixtures.hpp"
#include "immunity.hpp"
#include "metrics.hpp"
#include "mobility.hpp"
#include "network.hpp"
#include "packet_codec.hpp"
#include "protocol.hpp"
#include "rng.hpp"
#include "routing.hpp"
#include "routing_table.hpp"
#include "scenario.hpp"
#include "sweep.hpp"
#include "trace.hpp"
#include "transport.hpp"
