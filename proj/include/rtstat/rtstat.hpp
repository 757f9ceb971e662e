#pragma once

// Umbrella header: block return times, their CLT statistic and entropy
// estimator, the geometric log-moment oracles, dependence checks, the
// simulation harness, digit-file ingestion and the comparator estimators.

#include "rtstat/alphabet.hpp"
#include "rtstat/baselines.hpp"
#include "rtstat/block.hpp"
#include "rtstat/constants.hpp"
#include "rtstat/dependence.hpp"
#include "rtstat/errors.hpp"
#include "rtstat/ingest.hpp"
#include "rtstat/moments.hpp"
#include "rtstat/normal.hpp"
#include "rtstat/process_model.hpp"
#include "rtstat/return_times.hpp"
#include "rtstat/rng.hpp"
#include "rtstat/simulate.hpp"
#include "rtstat/statistics.hpp"
#include "rtstat/version.hpp"
