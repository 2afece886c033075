#pragma once

#include "exofab/error.hpp"
#include "exofab/numeric.hpp"
#include "exofab/geometry.hpp"
#include "exofab/fill.hpp"
#include "exofab/materials.hpp"
#include "exofab/validate.hpp"
#include "exofab/calibration.hpp"
#include "exofab/solver.hpp"
#include "exofab/dst.hpp"
#include "exofab/svg.hpp"
#include "exofab/spec_file.hpp"
#include "exofab/instructions.hpp"
