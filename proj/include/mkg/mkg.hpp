#pragma once

#include "mkg/error.hpp"
#include "mkg/gaudin.hpp"
#include "mkg/io.hpp"
#include "mkg/kappa.hpp"
#include "mkg/krawtchouk.hpp"
#include "mkg/lattice.hpp"
#include "mkg/operators.hpp"
#include "mkg/sparse.hpp"
#include "mkg/summation.hpp"
#include "mkg/verify.hpp"
#include "mkg/version.hpp"
