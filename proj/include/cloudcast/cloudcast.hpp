#pragma once

#include "cloudcast/errors.hpp"
#include "cloudcast/frame.hpp"
#include "cloudcast/knn.hpp"
#include "cloudcast/dconv.hpp"
#include "cloudcast/attention.hpp"
#include "cloudcast/parameters.hpp"
#include "cloudcast/tape.hpp"
#include "cloudcast/cells.hpp"
#include "cloudcast/seq2seq.hpp"
#include "cloudcast/training.hpp"
#include "cloudcast/metrics.hpp"
#include "cloudcast/datagen.hpp"
#include "cloudcast/stream_io.hpp"
#include "cloudcast/checkpoint.hpp"
#include "cloudcast/verify.hpp"
#include "cloudcast/bench.hpp"
