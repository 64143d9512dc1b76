#pragma once

#include "sspc/errors.hpp"
#include "sspc/experiment.hpp"
#include "sspc/fit.hpp"
#include "sspc/hamiltonian.hpp"
#include "sspc/hjb.hpp"
#include "sspc/io.hpp"
#include "sspc/json_io.hpp"
#include "sspc/operators.hpp"
#include "sspc/parallel.hpp"
#include "sspc/phase_space.hpp"
#include "sspc/quasimode.hpp"
#include "sspc/range.hpp"
#include "sspc/schema.hpp"
#include "sspc/special.hpp"
#include "sspc/spectral.hpp"
#include "sspc/symbol.hpp"
