// Copyright 2026 The aqec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Umbrella header for the library (the command-line layer lives under cli/).

#pragma once

#include "aqec/bounds.hpp"
#include "aqec/classent.hpp"
#include "aqec/codes.hpp"
#include "aqec/coset_sum.hpp"
#include "aqec/error.hpp"
#include "aqec/exactkl.hpp"
#include "aqec/fields.hpp"
#include "aqec/imperfect.hpp"
#include "aqec/linalg.hpp"
#include "aqec/noise.hpp"
#include "aqec/parallel.hpp"
#include "aqec/pipeline.hpp"
#include "aqec/rng.hpp"
