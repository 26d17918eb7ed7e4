#pragma once

#include "rdu/errors.hpp"
#include "rdu/distribution.hpp"
#include "rdu/distortion.hpp"
#include "rdu/utility.hpp"
#include "rdu/ambiguity.hpp"
#include "rdu/evaluator.hpp"
#include "rdu/battery.hpp"
#include "rdu/ellsberg.hpp"
#include "rdu/portfolio.hpp"
#include "rdu/io.hpp"
