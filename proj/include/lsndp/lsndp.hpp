#pragma once

#include "lsndp/error.hpp"
#include "lsndp/types.hpp"
#include "lsndp/linerlib_io.hpp"
#include "lsndp/graph.hpp"
#include "lsndp/mcf.hpp"
#include "lsndp/costs.hpp"
#include "lsndp/env.hpp"
#include "lsndp/search.hpp"
#include "lsndp/perturb.hpp"
#include "lsndp/report.hpp"
#include "lsndp/protocol.hpp"
