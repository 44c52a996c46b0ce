#pragma once

#include "cdrleak/analysis.hpp"
#include "cdrleak/equilibrium.hpp"
#include "cdrleak/error.hpp"
#include "cdrleak/model.hpp"
#include "cdrleak/policy.hpp"
#include "cdrleak/rng.hpp"
#include "cdrleak/table.hpp"
