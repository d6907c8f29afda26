#pragma once

#include "pbo/rational.hpp"
#include "pbo/scalar_poly.hpp"
#include "pbo/ncpoly.hpp"
#include "pbo/serialize.hpp"
#include "pbo/opderiv.hpp"
#include "pbo/poisson.hpp"
#include "pbo/dynamics.hpp"
#include "pbo/matrixrep.hpp"
#include "pbo/hybrid.hpp"
#include "pbo/wigner.hpp"
#include "pbo/random.hpp"
