#pragma once

#include "netbargain/cmatching.hpp"
#include "netbargain/coop.hpp"
#include "netbargain/instance.hpp"
#include "netbargain/io.hpp"
#include "netbargain/lp.hpp"
#include "netbargain/pipeline.hpp"
#include "netbargain/rational.hpp"
#include "netbargain/reduction.hpp"
#include "netbargain/repro.hpp"
#include "netbargain/semantics.hpp"
#include "netbargain/unit_solver.hpp"
