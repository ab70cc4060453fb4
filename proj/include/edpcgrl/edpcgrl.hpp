#pragma once

#include "edpcgrl/agents.hpp"
#include "edpcgrl/analysis.hpp"
#include "edpcgrl/error.hpp"
#include "edpcgrl/io/config.hpp"
#include "edpcgrl/io/csv.hpp"
#include "edpcgrl/parallel.hpp"
#include "edpcgrl/reward.hpp"
#include "edpcgrl/rng.hpp"
#include "edpcgrl/search.hpp"
#include "edpcgrl/session.hpp"
#include "edpcgrl/signals/eda.hpp"
#include "edpcgrl/signals/filter.hpp"
#include "edpcgrl/signals/ppg.hpp"
#include "edpcgrl/signals/series.hpp"
#include "edpcgrl/state_space.hpp"
#include "edpcgrl/stats/kmeans.hpp"
#include "edpcgrl/stats/stai.hpp"
#include "edpcgrl/stats/tests.hpp"
#include "edpcgrl/subjects.hpp"
