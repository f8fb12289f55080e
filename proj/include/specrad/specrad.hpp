#pragma once

#include "specrad/errors.hpp"
#include "specrad/rng.hpp"
#include "specrad/dist.hpp"
#include "specrad/ensemble.hpp"
#include "specrad/report.hpp"
#include "specrad/spectral.hpp"
#include "specrad/digraph.hpp"
#include "specrad/cyclestats.hpp"
#include "specrad/parallel.hpp"
#include "specrad/experiments.hpp"
