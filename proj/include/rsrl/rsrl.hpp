#pragma once

#include "rsrl/errors.hpp"
#include "rsrl/mdp.hpp"
#include "rsrl/risk_dp.hpp"
#include "rsrl/optimism.hpp"
#include "rsrl/rsvi.hpp"
#include "rsrl/rsq.hpp"
#include "rsrl/envs.hpp"
#include "rsrl/io.hpp"
#include "rsrl/harness.hpp"
