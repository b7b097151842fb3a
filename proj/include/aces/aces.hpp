#pragma once

#include "aces/benchmark.hpp"
#include "aces/config.hpp"
#include "aces/embedder.hpp"
#include "aces/error.hpp"
#include "aces/fluency.hpp"
#include "aces/labels.hpp"
#include "aces/model_dir.hpp"
#include "aces/scoring.hpp"
#include "aces/stub_backends.hpp"
#include "aces/tagger.hpp"
#include "aces/text.hpp"
#include "aces/tokenizer.hpp"
#include "aces/types.hpp"
