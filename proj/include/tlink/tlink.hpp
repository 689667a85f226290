#pragma once

#include "tlink/blend.hpp"
#include "tlink/calendar.hpp"
#include "tlink/dataset.hpp"
#include "tlink/evalx.hpp"
#include "tlink/features.hpp"
#include "tlink/gbdt.hpp"
#include "tlink/pipeline.hpp"
#include "tlink/synth.hpp"
#include "tlink/temporal_graph.hpp"
