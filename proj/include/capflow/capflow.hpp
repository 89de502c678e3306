#pragma once

#include "capflow/config.hpp"
#include "capflow/equilibrium.hpp"
#include "capflow/errors.hpp"
#include "capflow/experiment.hpp"
#include "capflow/model_config.hpp"
#include "capflow/policy.hpp"
#include "capflow/polynomial.hpp"
#include "capflow/simulation.hpp"
#include "capflow/stochastics.hpp"
#include "capflow/value_function.hpp"
