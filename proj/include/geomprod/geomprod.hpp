#pragma once

#include "geomprod/combinatorics.hpp"
#include "geomprod/compensated_sum.hpp"
#include "geomprod/errors.hpp"
#include "geomprod/format.hpp"
#include "geomprod/multiproduct.hpp"
#include "geomprod/oracle.hpp"
#include "geomprod/signal.hpp"
#include "geomprod/sweeps.hpp"
