#pragma once

#include "localcluster/datagen.hpp"
#include "localcluster/error.hpp"
#include "localcluster/experiments.hpp"
#include "localcluster/graph.hpp"
#include "localcluster/io.hpp"
#include "localcluster/json_io.hpp"
#include "localcluster/lce.hpp"
#include "localcluster/metrics.hpp"
#include "localcluster/node_set.hpp"
#include "localcluster/pipelines.hpp"
#include "localcluster/random.hpp"
#include "localcluster/selection.hpp"
#include "localcluster/sparse_recovery.hpp"
