#pragma once

#include "masim/asimulation.hpp"
#include "masim/classes.hpp"
#include "masim/error.hpp"
#include "masim/genmod.hpp"
#include "masim/harness.hpp"
#include "masim/kripke.hpp"
#include "masim/random.hpp"
#include "masim/semantics.hpp"
#include "masim/syntax.hpp"
#include "masim/translate.hpp"
#include "masim/types.hpp"
