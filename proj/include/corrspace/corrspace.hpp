// include/corrspace/corrspace.hpp

// Copyright 2026  The corrspace Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.


// Umbrella header.

#pragma once

#include "corrspace/common.hpp"
#include "corrspace/dataset.hpp"
#include "corrspace/dcca.hpp"
#include "corrspace/dgcca.hpp"
#include "corrspace/experiment.hpp"
#include "corrspace/linear_cca.hpp"
#include "corrspace/mlp.hpp"
#include "corrspace/model.hpp"
#include "corrspace/retrieval.hpp"
#include "corrspace/task_scoring.hpp"
#include "corrspace/training.hpp"
