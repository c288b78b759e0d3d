#pragma once

#include "diophlab/approxfn.hpp"
#include "diophlab/counting.hpp"
#include "diophlab/dynamo.hpp"
#include "diophlab/harness.hpp"
#include "diophlab/lattice.hpp"
#include "diophlab/manifold.hpp"
#include "diophlab/matrix.hpp"
#include "diophlab/rat.hpp"
#include "diophlab/rng.hpp"
