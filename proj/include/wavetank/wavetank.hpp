#pragma once

#include "wavetank/analytic.hpp"
#include "wavetank/core_model.hpp"
#include "wavetank/errors.hpp"
#include "wavetank/fit.hpp"
#include "wavetank/phase.hpp"
#include "wavetank/signal.hpp"
#include "wavetank/spectral.hpp"
