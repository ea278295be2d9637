#pragma once

#include "blamelogic/error.hpp"
#include "blamelogic/syntax.hpp"
#include "blamelogic/game.hpp"
#include "blamelogic/semantics.hpp"
#include "blamelogic/hilbert.hpp"
#include "blamelogic/generator.hpp"
