#pragma once

#include "probisim/bisim.hpp"
#include "probisim/epsilon.hpp"
#include "probisim/error.hpp"
#include "probisim/galois_sim.hpp"
#include "probisim/generators.hpp"
#include "probisim/io.hpp"
#include "probisim/linalg.hpp"
#include "probisim/pts.hpp"
