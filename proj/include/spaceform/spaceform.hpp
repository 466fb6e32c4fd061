#pragma once

#include "spaceform/auxiliary.hpp"
#include "spaceform/bvp.hpp"
#include "spaceform/core.hpp"
#include "spaceform/diffops.hpp"
#include "spaceform/domain.hpp"
#include "spaceform/fields.hpp"
#include "spaceform/geometry.hpp"
#include "spaceform/horolens.hpp"
#include "spaceform/jet.hpp"
#include "spaceform/mesh.hpp"
#include "spaceform/p2.hpp"
#include "spaceform/quadrature.hpp"
#include "spaceform/report.hpp"
#include "spaceform/rng.hpp"
#include "spaceform/suites.hpp"
#include "spaceform/surfaces.hpp"
#include "spaceform/verify.hpp"
