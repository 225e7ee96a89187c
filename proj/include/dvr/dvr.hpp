#pragma once

#include "dvr/constraint.hpp"
#include "dvr/content.hpp"
#include "dvr/error.hpp"
#include "dvr/evaluation.hpp"
#include "dvr/gateway.hpp"
#include "dvr/language.hpp"
#include "dvr/mock.hpp"
#include "dvr/orchestrator.hpp"
#include "dvr/phrasing.hpp"
#include "dvr/prompts.hpp"
#include "dvr/random.hpp"
#include "dvr/repository.hpp"
#include "dvr/synth.hpp"
#include "dvr/text.hpp"
#include "dvr/verifiers.hpp"
