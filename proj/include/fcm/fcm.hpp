#pragma once

#include "fcm/allocate.hpp"
#include "fcm/counters.hpp"
#include "fcm/datagen.hpp"
#include "fcm/dataset.hpp"
#include "fcm/experiment.hpp"
#include "fcm/hash.hpp"
#include "fcm/layout.hpp"
#include "fcm/metrics.hpp"
#include "fcm/montecarlo.hpp"
#include "fcm/occupancy.hpp"
#include "fcm/oracle.hpp"
#include "fcm/sketches.hpp"
