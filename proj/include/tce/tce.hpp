#pragma once

#include "commands.hpp"
#include "cone_exchange.hpp"
#include "continued_fraction.hpp"
#include "errors.hpp"
#include "expression.hpp"
#include "io.hpp"
#include "numeric.hpp"
#include "regions.hpp"
#include "renorm.hpp"
#include "return_map.hpp"
#include "sampling.hpp"
#include "verify.hpp"
#include "zlambda.hpp"
