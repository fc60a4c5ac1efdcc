#pragma once

#include "tweakboost/boost.hpp"
#include "tweakboost/cart.hpp"
#include "tweakboost/data.hpp"
#include "tweakboost/demo.hpp"
#include "tweakboost/error.hpp"
#include "tweakboost/prune.hpp"
#include "tweakboost/serialize.hpp"
#include "tweakboost/tweak.hpp"
