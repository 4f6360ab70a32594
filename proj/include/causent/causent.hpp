#pragma once

// Causal discovery on multivariate time series over extended summary graphs:
// greedy causation entropy estimation, PC- and FCI-style discovery, synthetic
// benchmark generators and scoring.

#include "causent/benchmark.hpp"
#include "causent/ci_test.hpp"
#include "causent/dataset.hpp"
#include "causent/errors.hpp"
#include "causent/estimator.hpp"
#include "causent/evaluate.hpp"
#include "causent/graph.hpp"
#include "causent/graph_io.hpp"
#include "causent/ksg.hpp"
#include "causent/orient_fci.hpp"
#include "causent/orient_pc.hpp"
#include "causent/parallel.hpp"
#include "causent/simulate.hpp"
#include "causent/skeleton.hpp"
