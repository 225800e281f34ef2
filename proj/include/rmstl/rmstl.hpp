#pragma once

#include "rmstl/config/document.hpp"
#include "rmstl/env/registry.hpp"
#include "rmstl/learner/trainer.hpp"
#include "rmstl/monitor/atoms.hpp"
#include "rmstl/monitor/robustness.hpp"
#include "rmstl/rm/machine.hpp"
#include "rmstl/runtime/episode.hpp"
#include "rmstl/runtime/session.hpp"
#include "rmstl/runtime/task_spec.hpp"
#include "rmstl/runtime/trace_io.hpp"
#include "rmstl/stl/parser.hpp"
