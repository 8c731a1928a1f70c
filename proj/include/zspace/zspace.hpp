// Umbrella header. Pulls in everything except the HTTP-backed pieces
// (service_embedder.hpp, serve.hpp), which include cpp-httplib.
#pragma once

#include "zspace/config.hpp"
#include "zspace/embedder.hpp"
#include "zspace/errors.hpp"
#include "zspace/eval.hpp"
#include "zspace/fsww.hpp"
#include "zspace/hash.hpp"
#include "zspace/intent.hpp"
#include "zspace/linalg.hpp"
#include "zspace/orchestrator.hpp"
#include "zspace/registry.hpp"
#include "zspace/report.hpp"
#include "zspace/retrieval.hpp"
#include "zspace/vec.hpp"
