#pragma once

#include "daaf/bandit.hpp"
#include "daaf/baselines.hpp"
#include "daaf/config.hpp"
#include "daaf/delay.hpp"
#include "daaf/environment.hpp"
#include "daaf/errors.hpp"
#include "daaf/harness.hpp"
#include "daaf/odaaf.hpp"
#include "daaf/output.hpp"
#include "daaf/policy.hpp"
#include "daaf/rng.hpp"
#include "daaf/schedule.hpp"
#include "daaf/suites.hpp"
#include "daaf/validation.hpp"
