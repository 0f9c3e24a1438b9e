#pragma once

#include "sdnet/error.hpp"
#include "sdnet/graph.hpp"
#include "sdnet/harness.hpp"
#include "sdnet/metrics.hpp"
#include "sdnet/sda.hpp"
#include "sdnet/sdc.hpp"
#include "sdnet/social_space.hpp"
