// Copyright 2026 The bandext Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace bandext {

// Base of every domain error. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define BANDEXT_DEFINE_ERROR(Name)          \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  };

// core
BANDEXT_DEFINE_ERROR(WriteError)
BANDEXT_DEFINE_ERROR(FormatError)
BANDEXT_DEFINE_ERROR(DataError)
BANDEXT_DEFINE_ERROR(ManifestError)
// dsp
BANDEXT_DEFINE_ERROR(BandError)
BANDEXT_DEFINE_ERROR(SpectrogramError)
BANDEXT_DEFINE_ERROR(ReconstructionError)
BANDEXT_DEFINE_ERROR(ResampleError)
// synth
BANDEXT_DEFINE_ERROR(ModelError)
// welltie
BANDEXT_DEFINE_ERROR(TieError)
BANDEXT_DEFINE_ERROR(SelectionError)
// autodiff
BANDEXT_DEFINE_ERROR(ShapeError)
BANDEXT_DEFINE_ERROR(StatError)
BANDEXT_DEFINE_ERROR(GraphError)
BANDEXT_DEFINE_ERROR(OptimizerError)
// cgan
BANDEXT_DEFINE_ERROR(SpecError)
BANDEXT_DEFINE_ERROR(TrainError)
BANDEXT_DEFINE_ERROR(DivergenceError)
BANDEXT_DEFINE_ERROR(CheckpointError)
// inference
BANDEXT_DEFINE_ERROR(GeometryError)
BANDEXT_DEFINE_ERROR(InferenceError)
// qc
BANDEXT_DEFINE_ERROR(MetricError)
BANDEXT_DEFINE_ERROR(StudyError)

#undef BANDEXT_DEFINE_ERROR

}  // namespace bandext
