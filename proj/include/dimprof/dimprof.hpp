#pragma once

#include "dimprof/bounds.hpp"
#include "dimprof/capacity.hpp"
#include "dimprof/core.hpp"
#include "dimprof/covering.hpp"
#include "dimprof/digitsets.hpp"
#include "dimprof/io.hpp"
#include "dimprof/projection.hpp"
#include "dimprof/rational.hpp"
#include "dimprof/report.hpp"
