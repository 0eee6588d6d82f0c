#pragma once

#include "losmap/channel.hpp"
#include "losmap/errors.hpp"
#include "losmap/experiment.hpp"
#include "losmap/geometry.hpp"
#include "losmap/linalg.hpp"
#include "losmap/los_map.hpp"
#include "losmap/network.hpp"
#include "losmap/prediction.hpp"
#include "losmap/relay.hpp"
#include "losmap/scenario.hpp"
#include "losmap/sensing.hpp"
