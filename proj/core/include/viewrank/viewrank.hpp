#pragma once

#include "viewrank/config.hpp"
#include "viewrank/datamodel.hpp"
#include "viewrank/diagnostics.hpp"
#include "viewrank/errors.hpp"
#include "viewrank/evaluation.hpp"
#include "viewrank/formats.hpp"
#include "viewrank/fusion.hpp"
#include "viewrank/labeling.hpp"
#include "viewrank/pipeline.hpp"
#include "viewrank/retrieval.hpp"
#include "viewrank/scoring.hpp"
#include "viewrank/synthetic.hpp"
