#pragma once

#include "exhelm/fem.hpp"
#include "exhelm/geometry.hpp"
#include "exhelm/gmres.hpp"
#include "exhelm/gmsh_io.hpp"
#include "exhelm/kernels.hpp"
#include "exhelm/mesh.hpp"
#include "exhelm/nonlocal.hpp"
#include "exhelm/precond.hpp"
#include "exhelm/problem.hpp"
#include "exhelm/quadrature.hpp"
#include "exhelm/specfun.hpp"
#include "exhelm/studies.hpp"
