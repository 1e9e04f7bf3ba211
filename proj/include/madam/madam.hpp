#pragma once

// Umbrella header for the offline library (everything except the HTTP backend).

#include "madam/backend.hpp"
#include "madam/baselines.hpp"
#include "madam/corpus_io.hpp"
#include "madam/dataset.hpp"
#include "madam/engine.hpp"
#include "madam/errors.hpp"
#include "madam/eval.hpp"
#include "madam/model.hpp"
#include "madam/parsing.hpp"
#include "madam/prompts.hpp"
#include "madam/rng.hpp"
#include "madam/text.hpp"
