#pragma once

// Sparse group PCA via double-thresholding power iteration, with
// diagonal-thresholding initialization, resampling-based threshold tuning,
// spiked-covariance simulation, and the matching theory diagnostics.

#include "sgpca/cov_operator.hpp"
#include "sgpca/error.hpp"
#include "sgpca/init.hpp"
#include "sgpca/io.hpp"
#include "sgpca/operators.hpp"
#include "sgpca/parallel.hpp"
#include "sgpca/rng.hpp"
#include "sgpca/simgen.hpp"
#include "sgpca/solver.hpp"
#include "sgpca/svg.hpp"
#include "sgpca/theory.hpp"
#include "sgpca/tuning.hpp"
#include "sgpca/types.hpp"
