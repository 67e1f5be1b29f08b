#pragma once

#include "types.hpp"
#include "errors.hpp"
#include "numerics.hpp"
#include "potential.hpp"
#include "transfer.hpp"
#include "exact.hpp"
#include "dynamical.hpp"
#include "ode.hpp"
#include "wave.hpp"
#include "scurve.hpp"
#include "approx.hpp"
#include "scan.hpp"
#include "design.hpp"
#include "io.hpp"
