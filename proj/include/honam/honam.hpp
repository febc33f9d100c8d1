#pragma once

#include "honam/errors.hpp"
#include "honam/tensor.hpp"
#include "honam/grad_check.hpp"
#include "honam/random.hpp"
#include "honam/units.hpp"
#include "honam/feature_nets.hpp"
#include "honam/interactions.hpp"
#include "honam/matrix.hpp"
#include "honam/model.hpp"
#include "honam/model_io.hpp"
#include "honam/data.hpp"
#include "honam/metrics.hpp"
#include "honam/train.hpp"
#include "honam/plot.hpp"
