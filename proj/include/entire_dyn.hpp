#pragma once

#include "entire_dyn/area.hpp"
#include "entire_dyn/complex_util.hpp"
#include "entire_dyn/counter_rng.hpp"
#include "entire_dyn/dynamics.hpp"
#include "entire_dyn/errors.hpp"
#include "entire_dyn/ext_real.hpp"
#include "entire_dyn/function_io.hpp"
#include "entire_dyn/function_kernel.hpp"
#include "entire_dyn/geometry.hpp"
#include "entire_dyn/growth.hpp"
#include "entire_dyn/measure.hpp"
#include "entire_dyn/parallel.hpp"
#include "entire_dyn/poincare.hpp"
#include "entire_dyn/polynomial.hpp"
#include "entire_dyn/weierstrass.hpp"
