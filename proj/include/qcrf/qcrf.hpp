#ifndef QCRF_QCRF_HPP
#define QCRF_QCRF_HPP

#include "qcrf/baselines.hpp"
#include "qcrf/bench.hpp"
#include "qcrf/binary_solver.hpp"
#include "qcrf/core.hpp"
#include "qcrf/errors.hpp"
#include "qcrf/io.hpp"
#include "qcrf/maxflow.hpp"
#include "qcrf/metrics.hpp"
#include "qcrf/multilabel_solver.hpp"
#include "qcrf/oracle.hpp"
#include "qcrf/superpix.hpp"
#include "qcrf/synthetic.hpp"
#include "qcrf/weights.hpp"

#endif
