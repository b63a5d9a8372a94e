#pragma once

#include "gsplace/area_hint.hpp"
#include "gsplace/bookshelf.hpp"
#include "gsplace/config.hpp"
#include "gsplace/density.hpp"
#include "gsplace/error.hpp"
#include "gsplace/gsp_init.hpp"
#include "gsplace/macro_schedule.hpp"
#include "gsplace/metrics.hpp"
#include "gsplace/netlist.hpp"
#include "gsplace/pipeline.hpp"
#include "gsplace/placer.hpp"
#include "gsplace/poisson.hpp"
#include "gsplace/random.hpp"
#include "gsplace/report.hpp"
#include "gsplace/signed_graph.hpp"
#include "gsplace/svg.hpp"
#include "gsplace/synthetic.hpp"
#include "gsplace/tuner.hpp"
#include "gsplace/wirelength.hpp"
