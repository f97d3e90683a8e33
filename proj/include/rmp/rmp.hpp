#pragma once

#include "rmp/errors.hpp"
#include "rmp/flow.hpp"
#include "rmp/lie.hpp"
#include "rmp/linalg.hpp"
#include "rmp/orbit.hpp"
#include "rmp/polytope.hpp"
#include "rmp/rational.hpp"
#include "rmp/ressayre.hpp"
#include "rmp/rng.hpp"
#include "rmp/serialize.hpp"
