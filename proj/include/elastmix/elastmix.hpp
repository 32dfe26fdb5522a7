#pragma once

#include "elastmix/common.hpp"
#include "elastmix/grid.hpp"
#include "elastmix/quadrature.hpp"
#include "elastmix/material.hpp"
#include "elastmix/element.hpp"
#include "elastmix/assembly.hpp"
#include "elastmix/fields.hpp"
#include "elastmix/solver.hpp"
#include "elastmix/interpolate.hpp"
#include "elastmix/manufactured.hpp"
#include "elastmix/verify.hpp"
#include "elastmix/study.hpp"
