// Copyright 2026 The sfg Authors.
//
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

#pragma once

#include "sfg/config.hpp"
#include "sfg/edge_catcher.hpp"
#include "sfg/environment.hpp"
#include "sfg/errors.hpp"
#include "sfg/ew.hpp"
#include "sfg/graph.hpp"
#include "sfg/graph_io.hpp"
#include "sfg/graph_params.hpp"
#include "sfg/hard_instances.hpp"
#include "sfg/harness.hpp"
#include "sfg/otcg.hpp"
#include "sfg/rng.hpp"
#include "sfg/stochastic_graph.hpp"
