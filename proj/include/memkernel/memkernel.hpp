#pragma once

#include "memkernel/errors.hpp"
#include "memkernel/gamma.hpp"
#include "memkernel/io.hpp"
#include "memkernel/kernels.hpp"
#include "memkernel/laplace.hpp"
#include "memkernel/moments.hpp"
#include "memkernel/operators.hpp"
#include "memkernel/properties.hpp"
#include "memkernel/quadrature.hpp"
#include "memkernel/special.hpp"
