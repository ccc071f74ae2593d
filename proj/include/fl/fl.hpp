// Umbrella header.
#pragma once

#include "fl/grid.hpp"
#include "fl/fft.hpp"
#include "fl/io.hpp"
#include "fl/testfn.hpp"
#include "fl/lp.hpp"
#include "fl/symbols.hpp"
#include "fl/multipliers.hpp"
#include "fl/katoponce.hpp"
#include "fl/spaces.hpp"
#include "fl/weights.hpp"
#include "fl/harness/config.hpp"
#include "fl/harness/experiment.hpp"
#include "fl/harness/trace.hpp"
#include "fl/harness/report.hpp"
#include "fl/harness/cli.hpp"
