#pragma once

#include "sandpile/embedding.hpp"
#include "sandpile/engine.hpp"
#include "sandpile/error.hpp"
#include "sandpile/graph.hpp"
#include "sandpile/grid_lab.hpp"
#include "sandpile/harmonic.hpp"
#include "sandpile/io.hpp"
#include "sandpile/parallel.hpp"
#include "sandpile/planar.hpp"
#include "sandpile/random.hpp"
#include "sandpile/reductions.hpp"
