#pragma once

#include "eebeam/campaign.hpp"
#include "eebeam/linalg.hpp"
#include "eebeam/metrics.hpp"
#include "eebeam/orchestrators.hpp"
#include "eebeam/peruser.hpp"
#include "eebeam/pricing.hpp"
#include "eebeam/scenario.hpp"
