#pragma once

#include "netvis/analytics.hpp"
#include "netvis/config.hpp"
#include "netvis/csv.hpp"
#include "netvis/error.hpp"
#include "netvis/experiments.hpp"
#include "netvis/graph.hpp"
#include "netvis/growth.hpp"
#include "netvis/kernels.hpp"
#include "netvis/parallel.hpp"
#include "netvis/rng.hpp"
#include "netvis/sampler.hpp"
#include "netvis/snapshot.hpp"
#include "netvis/visibility.hpp"
