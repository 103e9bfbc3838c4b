#pragma once

#include "wlanassoc/common.hpp"
#include "wlanassoc/topology.hpp"
#include "wlanassoc/phy.hpp"
#include "wlanassoc/mac.hpp"
#include "wlanassoc/matching.hpp"
#include "wlanassoc/scenario.hpp"
#include "wlanassoc/network.hpp"
#include "wlanassoc/association.hpp"
#include "wlanassoc/stats.hpp"
#include "wlanassoc/simcore.hpp"
#include "wlanassoc/dynamic.hpp"
#include "wlanassoc/config.hpp"
#include "wlanassoc/experiment.hpp"
