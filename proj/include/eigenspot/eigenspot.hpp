#ifndef EIGENSPOT_EIGENSPOT_HPP
#define EIGENSPOT_EIGENSPOT_HPP

// Umbrella header: spatiotemporal hotspot detection via rank-1 SVD and
// statistical process control, plus the simulation and evaluation harness.

#include "eigenspot/detector.hpp"
#include "eigenspot/errors.hpp"
#include "eigenspot/evaluation.hpp"
#include "eigenspot/io.hpp"
#include "eigenspot/matrix.hpp"
#include "eigenspot/rng.hpp"
#include "eigenspot/simulator.hpp"
#include "eigenspot/stats.hpp"
#include "eigenspot/svd.hpp"

#endif
