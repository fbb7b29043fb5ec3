#pragma once

#include "mcmc_lab/config.hpp"
#include "mcmc_lab/diagnostics.hpp"
#include "mcmc_lab/distributions.hpp"
#include "mcmc_lab/error.hpp"
#include "mcmc_lab/experiments.hpp"
#include "mcmc_lab/parallel.hpp"
#include "mcmc_lab/proposals.hpp"
#include "mcmc_lab/report.hpp"
#include "mcmc_lab/rng.hpp"
#include "mcmc_lab/rwm.hpp"
#include "mcmc_lab/targets.hpp"
#include "mcmc_lab/tempering.hpp"
