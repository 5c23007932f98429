#pragma once

#include "fbplot/curve.hpp"
#include "fbplot/errors.hpp"
#include "fbplot/ingest.hpp"
#include "fbplot/metrics.hpp"
#include "fbplot/report.hpp"
#include "fbplot/stats.hpp"
