#pragma once

#include "derg/csv.hpp"
#include "derg/experiments.hpp"
#include "derg/governor.hpp"
#include "derg/models.hpp"
#include "derg/rng.hpp"
#include "derg/simulate.hpp"
#include "derg/types.hpp"
