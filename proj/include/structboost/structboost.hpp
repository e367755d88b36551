#pragma once

#include "structboost/errors.hpp"
#include "structboost/random.hpp"
#include "structboost/vertex_set.hpp"
#include "structboost/graph.hpp"
#include "structboost/graph_io.hpp"
#include "structboost/connected_sets.hpp"
#include "structboost/spanning_tree.hpp"
#include "structboost/contraction.hpp"
#include "structboost/splits.hpp"
#include "structboost/csv.hpp"
#include "structboost/dataset.hpp"
#include "structboost/synthetic.hpp"
#include "structboost/tree.hpp"
#include "structboost/metrics.hpp"
#include "structboost/stats.hpp"
#include "structboost/boosting.hpp"
#include "structboost/model_io.hpp"
#include "structboost/experiment.hpp"
