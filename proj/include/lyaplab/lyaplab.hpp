#pragma once

// Umbrella header for the whole library.

#include "lyaplab/checks.hpp"
#include "lyaplab/config_io.hpp"
#include "lyaplab/estimators.hpp"
#include "lyaplab/experiments.hpp"
#include "lyaplab/exterior.hpp"
#include "lyaplab/increment_law.hpp"
#include "lyaplab/monomial.hpp"
#include "lyaplab/projective.hpp"
#include "lyaplab/qr_state.hpp"
#include "lyaplab/report_tables.hpp"
#include "lyaplab/result_table.hpp"
#include "lyaplab/return_clock.hpp"
#include "lyaplab/rng.hpp"
#include "lyaplab/scaled_matrix.hpp"
#include "lyaplab/scenario.hpp"
#include "lyaplab/spectral.hpp"
#include "lyaplab/svd.hpp"
#include "lyaplab/trajectory.hpp"
#include "lyaplab/types.hpp"
