#pragma once

// Umbrella header for the lieosc library.

#include "lieosc/catalog.hpp"
#include "lieosc/closed_form.hpp"
#include "lieosc/integrability.hpp"
#include "lieosc/invariants.hpp"
#include "lieosc/lie_system.hpp"
#include "lieosc/ode.hpp"
#include "lieosc/sl2.hpp"
#include "lieosc/time_function.hpp"
#include "lieosc/transform.hpp"
