#pragma once

#include "mmhard/rng.hpp"
#include "mmhard/params.hpp"
#include "mmhard/gadgets.hpp"
#include "mmhard/hopcroft_karp.hpp"
#include "mmhard/instance.hpp"
#include "mmhard/instance_io.hpp"
#include "mmhard/exact.hpp"
#include "mmhard/oracle.hpp"
#include "mmhard/distinguishers.hpp"
#include "mmhard/stats.hpp"
#include "mmhard/reference.hpp"
