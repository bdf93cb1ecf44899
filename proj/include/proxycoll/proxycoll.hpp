#pragma once

// Collision-aware geometric proxies for two-person motion: primitive fitting,
// containment tests, guidance directions and penetration resolution.

#include "proxycoll/bench.hpp"
#include "proxycoll/body_default.hpp"
#include "proxycoll/collision.hpp"
#include "proxycoll/fitting.hpp"
#include "proxycoll/guidance.hpp"
#include "proxycoll/io.hpp"
#include "proxycoll/math.hpp"
#include "proxycoll/mesh.hpp"
#include "proxycoll/metrics.hpp"
#include "proxycoll/motion.hpp"
#include "proxycoll/parallel.hpp"
#include "proxycoll/primitives.hpp"
#include "proxycoll/resolve.hpp"
#include "proxycoll/sampling.hpp"
#include "proxycoll/skeleton.hpp"
