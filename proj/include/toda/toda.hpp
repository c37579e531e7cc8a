#pragma once

#include "toda/branch.hpp"
#include "toda/growth.hpp"
#include "toda/hessian.hpp"
#include "toda/leaves.hpp"
#include "toda/report.hpp"
#include "toda/scan.hpp"
#include "toda/series.hpp"
