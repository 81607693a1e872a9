#pragma once

#include "csc/cluster_result.hpp"
#include "csc/eigensolver.hpp"
#include "csc/error.hpp"
#include "csc/features.hpp"
#include "csc/graph.hpp"
#include "csc/graph_io.hpp"
#include "csc/kmeans.hpp"
#include "csc/matrix.hpp"
#include "csc/metrics.hpp"
#include "csc/pipeline.hpp"
#include "csc/poly_filter.hpp"
#include "csc/rng.hpp"
#include "csc/sampling_interp.hpp"
#include "csc/sbm.hpp"
#include "csc/spectral_oracle.hpp"
#include "csc/spectrum_probe.hpp"
#include "csc/sweep.hpp"
