#pragma once

#include "ltioco/bound.hpp"
#include "ltioco/conformance.hpp"
#include "ltioco/dbm.hpp"
#include "ltioco/error.hpp"
#include "ltioco/model.hpp"
#include "ltioco/model_io.hpp"
#include "ltioco/oracle.hpp"
#include "ltioco/span.hpp"
#include "ltioco/traces.hpp"
#include "ltioco/zonegraph.hpp"
