#pragma once

#include "rqed/error.hpp"
#include "rqed/linalg.hpp"
#include "rqed/atom.hpp"
#include "rqed/hilbert.hpp"
#include "rqed/couplings.hpp"
#include "rqed/sw.hpp"
#include "rqed/hamiltonians.hpp"
#include "rqed/grid_models.hpp"
#include "rqed/resolvent.hpp"
#include "rqed/dynamics.hpp"
#include "rqed/metrics.hpp"
#include "rqed/config.hpp"
#include "rqed/csv.hpp"
#include "rqed/experiments.hpp"
