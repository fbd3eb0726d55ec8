#pragma once

#include "beam_optics.hpp"
#include "blockage_detection.hpp"
#include "classifiers.hpp"
#include "core.hpp"
#include "dataset.hpp"
#include "evaluation.hpp"
#include "feature_extraction.hpp"
#include "mesh_geometry.hpp"
#include "parallel.hpp"
#include "pipeline.hpp"
#include "random.hpp"
#include "scenario_io.hpp"
#include "target_catalog.hpp"
#include "target_scene.hpp"
