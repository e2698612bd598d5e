#pragma once

#include "cm3/benchmark.hpp"
#include "cm3/blocks.hpp"
#include "cm3/cluster.hpp"
#include "cm3/decluster.hpp"
#include "cm3/evaluate.hpp"
#include "cm3/fit.hpp"
#include "cm3/io.hpp"
#include "cm3/matrix.hpp"
#include "cm3/parameters.hpp"
#include "cm3/rng.hpp"
#include "cm3/simulate.hpp"
#include "cm3/theory.hpp"
