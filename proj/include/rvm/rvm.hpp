#ifndef RVM_RVM_HPP
#define RVM_RVM_HPP

#include "rvm/budget.hpp"
#include "rvm/commutator.hpp"
#include "rvm/exponents.hpp"
#include "rvm/fft.hpp"
#include "rvm/fit.hpp"
#include "rvm/io.hpp"
#include "rvm/kinematics.hpp"
#include "rvm/mollify.hpp"
#include "rvm/phase_grid.hpp"
#include "rvm/reduce.hpp"
#include "rvm/regularity.hpp"
#include "rvm/solver.hpp"
#include "rvm/spline.hpp"
#include "rvm/synth.hpp"

#endif
