#pragma once

// Convenience umbrella for the whole library. Individual headers are
// independently includable; the CLI front end (cli.hpp) is kept out because
// it pulls in CLI11.

#include "bcfw/block_vector.hpp"
#include "bcfw/constraints.hpp"
#include "bcfw/experiments.hpp"
#include "bcfw/objective.hpp"
#include "bcfw/rng.hpp"
#include "bcfw/schedule.hpp"
#include "bcfw/solver.hpp"
#include "bcfw/spectral.hpp"
#include "bcfw/svg.hpp"
#include "bcfw/trace.hpp"
