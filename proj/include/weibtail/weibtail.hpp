#pragma once

#include "weibtail/distributions.hpp"
#include "weibtail/errors.hpp"
#include "weibtail/estimators.hpp"
#include "weibtail/io.hpp"
#include "weibtail/kernel.hpp"
#include "weibtail/log_spacings.hpp"
#include "weibtail/ordered_sample.hpp"
#include "weibtail/quantile.hpp"
#include "weibtail/rng.hpp"
#include "weibtail/selection.hpp"
#include "weibtail/simulation.hpp"
#include "weibtail/special_functions.hpp"
#include "weibtail/stats.hpp"
