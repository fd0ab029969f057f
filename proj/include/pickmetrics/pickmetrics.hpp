#pragma once

#include "errors.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "kernel.hpp"
#include "metrics.hpp"
#include "geodesy.hpp"
#include "coefficients.hpp"
#include "packing.hpp"
