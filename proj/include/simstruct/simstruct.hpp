#pragma once

#include "simstruct/core/errors.hpp"
#include "simstruct/core/linalg.hpp"
#include "simstruct/core/parallel.hpp"
#include "simstruct/core/random.hpp"
#include "simstruct/core/tensor.hpp"

#include "simstruct/regularizers.hpp"
#include "simstruct/measurement.hpp"
#include "simstruct/signals.hpp"

#include "simstruct/solver/projections.hpp"
#include "simstruct/solver/splitting.hpp"
#include "simstruct/solver/cone_distance.hpp"
#include "simstruct/solver/polish.hpp"
#include "simstruct/solver/recovery.hpp"
#include "simstruct/solver/dual_norm.hpp"

#include "simstruct/statdim.hpp"
#include "simstruct/bounds.hpp"

#include "simstruct/experiments/regularizer_spec.hpp"
#include "simstruct/experiments/config.hpp"
#include "simstruct/experiments/phase.hpp"
#include "simstruct/experiments/analysis.hpp"
#include "simstruct/experiments/sweeps.hpp"
#include "simstruct/experiments/io.hpp"
