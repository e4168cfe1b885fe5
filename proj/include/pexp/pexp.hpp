#pragma once

// Umbrella header. io.hpp is left out because it needs nlohmann/json.

#include "pexp/classify.hpp"
#include "pexp/errors.hpp"
#include "pexp/estimate.hpp"
#include "pexp/fractional.hpp"
#include "pexp/generators.hpp"
#include "pexp/global_reg.hpp"
#include "pexp/leaders.hpp"
#include "pexp/regression.hpp"
#include "pexp/signal.hpp"
#include "pexp/wavelet.hpp"
