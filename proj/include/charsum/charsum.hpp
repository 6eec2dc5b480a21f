#pragma once

#include "charsum/errors.hpp"
#include "charsum/arith.hpp"
#include "charsum/characters.hpp"
#include "charsum/multfun.hpp"
#include "charsum/expsums.hpp"
#include "charsum/theory.hpp"
#include "charsum/mimicry.hpp"
#include "charsum/dioph.hpp"
#include "charsum/extremal.hpp"
