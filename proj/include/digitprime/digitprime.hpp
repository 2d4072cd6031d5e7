#pragma once

#include "digitprime/bitconstraint.hpp"
#include "digitprime/characters.hpp"
#include "digitprime/circle.hpp"
#include "digitprime/numthy.hpp"
#include "digitprime/spectra.hpp"
#include "digitprime/util.hpp"
