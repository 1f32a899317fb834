#pragma once

#include "paro/bunch_kaufman.hpp"
#include "paro/clustering.hpp"
#include "paro/dense_eig.hpp"
#include "paro/diagnostics.hpp"
#include "paro/errors.hpp"
#include "paro/inner_product.hpp"
#include "paro/matrix_market.hpp"
#include "paro/model_problems.hpp"
#include "paro/parallel.hpp"
#include "paro/rng.hpp"
#include "paro/serialize.hpp"
#include "paro/solver.hpp"
#include "paro/subspace.hpp"
#include "paro/sym_matrix.hpp"
#include "paro/trace.hpp"
