#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 idva authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------
//
//  Umbrella header: the whole library in one include.
//
//------------------------------------------------------------------------------

#include <idva/core.hpp>
#include <idva/experiment.hpp>
#include <idva/graphs.hpp>
#include <idva/json_io.hpp>
#include <idva/kdep_mechanism.hpp>
#include <idva/rng.hpp>
#include <idva/sos_mechanism.hpp>
#include <idva/step_function.hpp>
#include <idva/valuations.hpp>
#include <idva/verify.hpp>
