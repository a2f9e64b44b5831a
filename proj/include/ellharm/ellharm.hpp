#pragma once

#include "ellharm/config.hpp"
#include "ellharm/ellipsoid.hpp"
#include "ellharm/error.hpp"
#include "ellharm/experiments.hpp"
#include "ellharm/lame.hpp"
#include "ellharm/normconst.hpp"
#include "ellharm/pcm.hpp"
#include "ellharm/quad.hpp"
#include "ellharm/summation.hpp"
#include "ellharm/tridiag.hpp"
#include "ellharm/vec3.hpp"
