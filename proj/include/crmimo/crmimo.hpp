#pragma once

#include "crmimo/errors.hpp"
#include "crmimo/hermitian.hpp"
#include "crmimo/rng.hpp"
#include "crmimo/scenario.hpp"
#include "crmimo/mac.hpp"
#include "crmimo/bc.hpp"
#include "crmimo/sipa.hpp"
#include "crmimo/parallel.hpp"
#include "crmimo/experiment.hpp"
