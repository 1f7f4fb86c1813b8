#pragma once

#include "tspbench/backends.hpp"
#include "tspbench/bench.hpp"
#include "tspbench/errors.hpp"
#include "tspbench/instance.hpp"
#include "tspbench/metrics.hpp"
#include "tspbench/perm.hpp"
#include "tspbench/process.hpp"
#include "tspbench/protocol.hpp"
#include "tspbench/tsp.hpp"
