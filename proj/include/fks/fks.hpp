#pragma once

// Everything in one include.

#include "fks/error.hpp"
#include "fks/spectral.hpp"
#include "fks/model.hpp"
#include "fks/diagnostics.hpp"
#include "fks/stepper.hpp"
#include "fks/scenario.hpp"
#include "fks/experiments.hpp"
#include "fks/selftest.hpp"
