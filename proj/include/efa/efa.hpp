#ifndef EFA_EFA_HPP
#define EFA_EFA_HPP

#include "efa/acceptance.hpp"
#include "efa/averaging.hpp"
#include "efa/coefficient.hpp"
#include "efa/config.hpp"
#include "efa/csv.hpp"
#include "efa/error.hpp"
#include "efa/experiments.hpp"
#include "efa/grid.hpp"
#include "efa/kernel.hpp"
#include "efa/macroscale.hpp"
#include "efa/micro.hpp"
#include "efa/quadratic.hpp"
#include "efa/reference.hpp"
#include "efa/regression.hpp"
#include "efa/types.hpp"
#include "efa/upscale.hpp"
#include "efa/work_queue.hpp"

#endif // EFA_EFA_HPP
