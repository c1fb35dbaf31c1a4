// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 rpnsel contributors

#pragma once

#include "rpnsel/baselines.hpp"
#include "rpnsel/channel.hpp"
#include "rpnsel/flops.hpp"
#include "rpnsel/harness.hpp"
#include "rpnsel/metrics.hpp"
#include "rpnsel/numerics.hpp"
#include "rpnsel/objective.hpp"
#include "rpnsel/rng.hpp"
#include "rpnsel/rpn.hpp"
#include "rpnsel/topology.hpp"
