#pragma once

#include "sindy_lom/dataset.hpp"
#include "sindy_lom/error.hpp"
#include "sindy_lom/liboptim.hpp"
#include "sindy_lom/library.hpp"
#include "sindy_lom/loss.hpp"
#include "sindy_lom/model_io.hpp"
#include "sindy_lom/report.hpp"
#include "sindy_lom/rollout.hpp"
#include "sindy_lom/stlsq.hpp"
#include "sindy_lom/synth.hpp"
