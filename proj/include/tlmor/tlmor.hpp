#pragma once

#include "tlmor/baselines.hpp"
#include "tlmor/errors.hpp"
#include "tlmor/gramnorm.hpp"
#include "tlmor/numkit.hpp"
#include "tlmor/porkcure.hpp"
#include "tlmor/rkrylov.hpp"
#include "tlmor/sysmodel.hpp"
#include "tlmor/tlcure.hpp"
#include "tlmor/tlpork.hpp"
