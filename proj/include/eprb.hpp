#pragma once

#include "eprb/analyticity.hpp"
#include "eprb/correlation.hpp"
#include "eprb/errors.hpp"
#include "eprb/geometry.hpp"
#include "eprb/hidden_variables.hpp"
#include "eprb/inequalities.hpp"
#include "eprb/models.hpp"
#include "eprb/zoo.hpp"
