#pragma once

#include "obskit/ambiguity.hpp"
#include "obskit/errors.hpp"
#include "obskit/estimator.hpp"
#include "obskit/measurement.hpp"
#include "obskit/observability.hpp"
#include "obskit/quadrature.hpp"
#include "obskit/scenario.hpp"
#include "obskit/scenario_io.hpp"
#include "obskit/serialize.hpp"
#include "obskit/trajectory.hpp"
