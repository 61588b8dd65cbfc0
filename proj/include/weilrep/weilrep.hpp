#pragma once

#include "arith.hpp"
#include "cyclotomic.hpp"
#include "dims.hpp"
#include "errors.hpp"
#include "fqm.hpp"
#include "integer_matrix.hpp"
#include "io.hpp"
#include "lattice.hpp"
#include "lifts.hpp"
#include "newforms.hpp"
#include "rational.hpp"
#include "series.hpp"
#include "specfun.hpp"
#include "weil.hpp"
