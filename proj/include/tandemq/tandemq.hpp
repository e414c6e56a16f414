// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "tandemq/equilibrium.hpp"
#include "tandemq/model.hpp"
#include "tandemq/partial_info.hpp"
#include "tandemq/simulate.hpp"
#include "tandemq/sojourn.hpp"
#include "tandemq/steady_state.hpp"
#include "tandemq/validate_suite.hpp"
#include "tandemq/version.hpp"
