#pragma once

// Umbrella header for the spaceform toolkit.

#include "spaceform/ambient.hpp"
#include "spaceform/catalog.hpp"
#include "spaceform/error.hpp"
#include "spaceform/expression.hpp"
#include "spaceform/flow.hpp"
#include "spaceform/functionals.hpp"
#include "spaceform/immersion.hpp"
#include "spaceform/intrinsic.hpp"
#include "spaceform/jet.hpp"
#include "spaceform/parallel.hpp"
#include "spaceform/quadrature.hpp"
#include "spaceform/shape.hpp"
#include "spaceform/shape_algebra.hpp"

namespace spaceform {

#ifdef SPACEFORM_VERSION
inline constexpr const char* kVersion = SPACEFORM_VERSION;
#else
inline constexpr const char* kVersion = "0.3.0";
#endif

}  // namespace spaceform
