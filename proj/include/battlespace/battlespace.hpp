#pragma once

#include "battlespace/agents.hpp"
#include "battlespace/analysis.hpp"
#include "battlespace/encoders.hpp"
#include "battlespace/engine.hpp"
#include "battlespace/learning.hpp"
#include "battlespace/nn.hpp"
#include "battlespace/session.hpp"
#include "battlespace/snapshot.hpp"
