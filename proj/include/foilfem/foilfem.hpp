// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "foilfem/assembly.hpp"
#include "foilfem/config.hpp"

#include "foilfem/dof.hpp"
#include "foilfem/export.hpp"
#include "foilfem/formulations.hpp"
#include "foilfem/geometry.hpp"
#include "foilfem/materials.hpp"
#include "foilfem/mesh.hpp"
#include "foilfem/msh_io.hpp"
#include "foilfem/postproc.hpp"
#include "foilfem/quadrature.hpp"
#include "foilfem/runner.hpp"

#include "foilfem/shape.hpp"
#include "foilfem/solvers.hpp"
#include "foilfem/topology.hpp"
