#pragma once

#include "desync/centrality.hpp"
#include "desync/dynamics.hpp"
#include "desync/error.hpp"
#include "desync/experiment.hpp"
#include "desync/generators.hpp"
#include "desync/graph.hpp"
#include "desync/io.hpp"
#include "desync/metrics.hpp"
#include "desync/rng.hpp"
#include "desync/selection.hpp"
#include "desync/version.hpp"
