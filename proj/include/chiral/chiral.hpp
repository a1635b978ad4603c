#pragma once

#include "chiral/darboux.hpp"
#include "chiral/matrix.hpp"
#include "chiral/model.hpp"
#include "chiral/quasidet.hpp"
#include "chiral/report.hpp"
#include "chiral/su2.hpp"
#include "chiral/tolerances.hpp"
#include "chiral/verify.hpp"
