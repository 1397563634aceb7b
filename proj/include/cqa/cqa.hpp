// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header: the full library including the HTTP transport and mock
// server. Include individual headers instead when HTTP is not needed.

#pragma once

#include "cqa/client.hpp"
#include "cqa/compound.hpp"
#include "cqa/config.hpp"
#include "cqa/csv.hpp"
#include "cqa/dataset.hpp"
#include "cqa/dialogue.hpp"
#include "cqa/digest.hpp"
#include "cqa/errors.hpp"
#include "cqa/http_transport.hpp"
#include "cqa/jsonl.hpp"
#include "cqa/metrics.hpp"
#include "cqa/mock.hpp"
#include "cqa/mock_server.hpp"
#include "cqa/report.hpp"
#include "cqa/rl.hpp"
#include "cqa/runner.hpp"
#include "cqa/trace.hpp"
#include "cqa/verifier.hpp"
#include "cqa/verifier_corpus.hpp"
#include "cqa/version.hpp"
