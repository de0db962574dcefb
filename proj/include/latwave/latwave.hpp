#pragma once

#include "latwave/errors.hpp"
#include "latwave/expression.hpp"
#include "latwave/grid.hpp"
#include "latwave/potentials.hpp"
#include "latwave/flow.hpp"
#include "latwave/wavetrain.hpp"
#include "latwave/lattice.hpp"
#include "latwave/io.hpp"
