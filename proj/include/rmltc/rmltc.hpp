#pragma once

#include "rmltc/data_value.hpp"
#include "rmltc/errors.hpp"
#include "rmltc/event_model.hpp"
#include "rmltc/monitor.hpp"
#include "rmltc/oracle.hpp"
#include "rmltc/parser.hpp"
#include "rmltc/spec_system.hpp"
#include "rmltc/statics.hpp"
#include "rmltc/trace_algebra.hpp"
