#pragma once

#include "rissnr/arrays.hpp"
#include "rissnr/chanstats.hpp"
#include "rissnr/errors.hpp"
#include "rissnr/experiment.hpp"
#include "rissnr/montecarlo.hpp"
#include "rissnr/ris.hpp"
#include "rissnr/spa.hpp"
