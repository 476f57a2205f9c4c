#pragma once

#include "specgraph/bounds.hpp"
#include "specgraph/dense_eig.hpp"
#include "specgraph/detect.hpp"
#include "specgraph/eigensolver.hpp"
#include "specgraph/error.hpp"
#include "specgraph/experiments.hpp"
#include "specgraph/graph.hpp"
#include "specgraph/models.hpp"
#include "specgraph/operator.hpp"
#include "specgraph/parallel.hpp"
#include "specgraph/regularize.hpp"
#include "specgraph/rng.hpp"
