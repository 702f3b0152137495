#pragma once

// Umbrella header: stochastic trace and diagonal estimation for cubical
// tensors through mode-contraction queries, exact variance analysis, query
// budget calculators, synthetic generators, and the experiment harness.

#include "tensorprobe/cp_tensor.hpp"
#include "tensorprobe/csv.hpp"
#include "tensorprobe/dense_tensor.hpp"
#include "tensorprobe/enumeration.hpp"
#include "tensorprobe/errors.hpp"
#include "tensorprobe/estimators.hpp"
#include "tensorprobe/experiment.hpp"
#include "tensorprobe/numeric.hpp"
#include "tensorprobe/oracle.hpp"
#include "tensorprobe/probes.hpp"
#include "tensorprobe/rng.hpp"
#include "tensorprobe/sample_size.hpp"
#include "tensorprobe/svg.hpp"
#include "tensorprobe/synth.hpp"
#include "tensorprobe/tensor_io.hpp"
#include "tensorprobe/threading.hpp"
#include "tensorprobe/variance.hpp"
