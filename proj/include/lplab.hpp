#pragma once

#include "lplab/errors.hpp"
#include "lplab/parallel.hpp"
#include "lplab/fft.hpp"
#include "lplab/grid.hpp"
#include "lplab/field_io.hpp"
#include "lplab/littlewood_paley.hpp"
#include "lplab/norms.hpp"
#include "lplab/kernels.hpp"
#include "lplab/subordination.hpp"
#include "lplab/verifier.hpp"
