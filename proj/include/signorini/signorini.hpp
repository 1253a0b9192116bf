#pragma once

#include "signorini/assembly.hpp"
#include "signorini/biortho.hpp"
#include "signorini/error.hpp"
#include "signorini/linalg.hpp"
#include "signorini/manufactured.hpp"
#include "signorini/mesh.hpp"
#include "signorini/norms.hpp"
#include "signorini/quadrature.hpp"
#include "signorini/solver.hpp"
#include "signorini/steklov.hpp"
#include "signorini/study.hpp"
