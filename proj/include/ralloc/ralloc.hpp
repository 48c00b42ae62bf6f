#pragma once

#include "errors.hpp"
#include "rng.hpp"
#include "distributions.hpp"
#include "choice_model.hpp"
#include "model.hpp"
#include "stats.hpp"
#include "engine.hpp"
#include "fluid_guide.hpp"
#include "policies.hpp"
#include "assortment.hpp"
#include "randproc.hpp"
#include "simplex.hpp"
#include "lp.hpp"
#include "clairvoyant.hpp"
#include "certificate.hpp"
#include "json_io.hpp"
#include "generators.hpp"
