// cpbqed.hpp — umbrella header for the Cooper-pair box / cavity simulation library

#pragma once

#include "cpbqed/errors.hpp"
#include "cpbqed/linalg.hpp"
#include "cpbqed/hilbert.hpp"
#include "cpbqed/model.hpp"
#include "cpbqed/evolve.hpp"
#include "cpbqed/oracle.hpp"
#include "cpbqed/measures.hpp"
#include "cpbqed/wigner.hpp"
#include "cpbqed/analysis.hpp"
#include "cpbqed/scenario.hpp"
#include "cpbqed/runner.hpp"
