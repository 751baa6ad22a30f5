#pragma once

#include "qcond/chain.hpp"
#include "qcond/channels.hpp"
#include "qcond/complex_matrix.hpp"
#include "qcond/conditional.hpp"
#include "qcond/errors.hpp"
#include "qcond/generalized.hpp"
#include "qcond/linalg.hpp"
#include "qcond/measures.hpp"
#include "qcond/rng.hpp"
#include "qcond/states.hpp"
#include "qcond/subsystems.hpp"
#include "qcond/verify.hpp"
