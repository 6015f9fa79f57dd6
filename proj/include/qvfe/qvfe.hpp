#pragma once

// Everything at once. Individual headers can be included on their own.

#include "qvfe/csv.hpp"
#include "qvfe/cycle_dynamics.hpp"
#include "qvfe/elliptic.hpp"
#include "qvfe/engine_metrics.hpp"
#include "qvfe/errors.hpp"
#include "qvfe/manifest.hpp"
#include "qvfe/open_chain.hpp"
#include "qvfe/oracles.hpp"
#include "qvfe/oscillator_network.hpp"
#include "qvfe/parallel.hpp"
#include "qvfe/presets.hpp"
#include "qvfe/qubit_chain_ff.hpp"
#include "qvfe/qubit_exact.hpp"
#include "qvfe/random.hpp"
#include "qvfe/sweep.hpp"
#include "qvfe/table.hpp"
#include "qvfe/two_qubit.hpp"
#include "qvfe/validation.hpp"
