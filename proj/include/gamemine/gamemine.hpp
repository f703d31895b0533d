#pragma once

#include "gamemine/arff.hpp"
#include "gamemine/classifiers.hpp"
#include "gamemine/evaluate.hpp"
#include "gamemine/featurize.hpp"
#include "gamemine/gamedata.hpp"
#include "gamemine/model_io.hpp"
#include "gamemine/report.hpp"
#include "gamemine/rng.hpp"
#include "gamemine/smo.hpp"
#include "gamemine/synthetic.hpp"
#include "gamemine/version.hpp"
