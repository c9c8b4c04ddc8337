// Umbrella header.

#pragma once

#include "omqm/closed_form.hpp"
#include "omqm/dynamics.hpp"
#include "omqm/errors.hpp"
#include "omqm/multidim.hpp"
#include "omqm/params.hpp"
#include "omqm/pathint.hpp"
#include "omqm/quadrature.hpp"
#include "omqm/quanta.hpp"
#include "omqm/stochastic.hpp"
