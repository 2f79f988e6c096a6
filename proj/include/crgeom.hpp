#pragma once

#include "crgeom/errors.hpp"
#include "crgeom/numeric_core.hpp"
#include "crgeom/operator_calculus.hpp"
#include "crgeom/subspace_geometry.hpp"
#include "crgeom/metrics_perturbation.hpp"
#include "crgeom/orbit_geometry.hpp"
#include "crgeom/fixed_range.hpp"
#include "crgeom/random.hpp"
#include "crgeom/convergence_lab.hpp"
#include "crgeom/io.hpp"
#include "crgeom/verify.hpp"
