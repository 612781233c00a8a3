#pragma once

#include "msmc/ar.hpp"
#include "msmc/chp.hpp"
#include "msmc/data.hpp"
#include "msmc/error.hpp"
#include "msmc/format.hpp"
#include "msmc/linearity.hpp"
#include "msmc/mc_engine.hpp"
#include "msmc/moment_stats.hpp"
#include "msmc/msar.hpp"
#include "msmc/parallel.hpp"
#include "msmc/random.hpp"
#include "msmc/study.hpp"
