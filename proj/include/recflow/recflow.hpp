// Copyright 2026 The recflow Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RECFLOW_RECFLOW_HPP
#define RECFLOW_RECFLOW_HPP

#include "recflow/common.hpp"
#include "recflow/constructions.hpp"
#include "recflow/dimacs.hpp"
#include "recflow/experiment.hpp"
#include "recflow/graph.hpp"
#include "recflow/greedy.hpp"
#include "recflow/metrics.hpp"
#include "recflow/min_cost_flow.hpp"
#include "recflow/ratings.hpp"
#include "recflow/relevance.hpp"
#include "recflow/rerankers.hpp"
#include "recflow/targets.hpp"

#endif  // RECFLOW_RECFLOW_HPP
