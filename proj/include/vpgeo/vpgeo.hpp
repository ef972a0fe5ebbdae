#pragma once

#include "vpgeo/cli.hpp"
#include "vpgeo/cuboid.hpp"
#include "vpgeo/errors.hpp"
#include "vpgeo/fusion.hpp"
#include "vpgeo/json_io.hpp"
#include "vpgeo/metrics.hpp"
#include "vpgeo/projective.hpp"
#include "vpgeo/refine.hpp"
#include "vpgeo/render.hpp"
#include "vpgeo/rng.hpp"
#include "vpgeo/synth.hpp"
#include "vpgeo/vploss.hpp"
#include "vpgeo/warp.hpp"
