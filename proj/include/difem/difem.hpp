#pragma once

#include "difem/common.hpp"
#include "difem/mesh.hpp"
#include "difem/quadrature.hpp"
#include "difem/level_set.hpp"
#include "difem/cut_geometry.hpp"
#include "difem/problem_spec.hpp"
#include "difem/fe_spaces.hpp"
#include "difem/assembly.hpp"
#include "difem/infsup.hpp"
#include "difem/interpolation.hpp"
#include "difem/errors.hpp"
#include "difem/problems.hpp"
