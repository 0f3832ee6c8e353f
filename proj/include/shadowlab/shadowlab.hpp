#pragma once

#include "shadowlab/chain.hpp"
#include "shadowlab/core.hpp"
#include "shadowlab/cylinder.hpp"
#include "shadowlab/io.hpp"
#include "shadowlab/measures.hpp"
#include "shadowlab/pseudo_orbits.hpp"
#include "shadowlab/seq_core.hpp"
#include "shadowlab/shift.hpp"
#include "shadowlab/specification.hpp"
#include "shadowlab/systems.hpp"
#include "shadowlab/tracing.hpp"
