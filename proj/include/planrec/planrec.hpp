#pragma once

#include "planrec/bayes/network.hpp"
#include "planrec/bayes/network_json.hpp"
#include "planrec/infer/elimination.hpp"
#include "planrec/infer/factor.hpp"
#include "planrec/recog/roles.hpp"
#include "planrec/recog/scenario.hpp"
#include "planrec/traffic/builder.hpp"
#include "planrec/traffic/params.hpp"
#include "planrec/traffic/rules.hpp"
#include "planrec/traffic/scenarios.hpp"
