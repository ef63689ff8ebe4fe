#pragma once

#include "sumimo/analysis.hpp"
#include "sumimo/complex.hpp"
#include "sumimo/harness.hpp"
#include "sumimo/link.hpp"
#include "sumimo/link_precoded.hpp"
#include "sumimo/link_raw.hpp"
#include "sumimo/matrix.hpp"
#include "sumimo/rng.hpp"
#include "sumimo/stats.hpp"
#include "sumimo/turbo.hpp"
