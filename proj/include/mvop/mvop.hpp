#pragma once

#include "mvop/scalar.hpp"
#include "mvop/errors.hpp"
#include "mvop/graded_basis.hpp"
#include "mvop/poly.hpp"
#include "mvop/poly_io.hpp"
#include "mvop/measures.hpp"
#include "mvop/matrix.hpp"
#include "mvop/block_linalg.hpp"
#include "mvop/mvopr.hpp"
#include "mvop/tolerances.hpp"
#include "mvop/darboux.hpp"
#include "mvop/nodes.hpp"
#include "mvop/serialize.hpp"
