#pragma once

#include "sra/error.hpp"
#include "sra/ranked.hpp"
#include "sra/binning.hpp"
#include "sra/poisson.hpp"
#include "sra/stability.hpp"
#include "sra/spad_sim.hpp"
#include "sra/record_io.hpp"
