#pragma once

#include "opcalc/classify.hpp"
#include "opcalc/error.hpp"
#include "opcalc/exact.hpp"
#include "opcalc/expr.hpp"
#include "opcalc/kernels.hpp"
#include "opcalc/operator.hpp"
#include "opcalc/oracle.hpp"
#include "opcalc/result.hpp"
#include "opcalc/series.hpp"
#include "opcalc/sinc_lab.hpp"
#include "opcalc/transform.hpp"
