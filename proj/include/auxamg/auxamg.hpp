/// @file auxamg.hpp
/// @brief Convenience umbrella: the whole solver in one include.

#ifndef AUXAMG_AUXAMG_HPP
#define AUXAMG_AUXAMG_HPP

#include "auxgrid.hpp"
#include "cycle.hpp"
#include "dense.hpp"
#include "errors.hpp"
#include "hierarchy.hpp"
#include "matrix_market.hpp"
#include "parallel.hpp"
#include "problems.hpp"
#include "smoother.hpp"
#include "sparse.hpp"

#endif // AUXAMG_AUXAMG_HPP
