#pragma once

#include "linkpred/edge_list.hpp"
#include "linkpred/evaluation.hpp"
#include "linkpred/experiment.hpp"
#include "linkpred/graph.hpp"
#include "linkpred/manifest.hpp"
#include "linkpred/report.hpp"
#include "linkpred/rng.hpp"
#include "linkpred/similarity.hpp"
