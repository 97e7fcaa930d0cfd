// Copyright 2026 The NeuronRank Authors
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

#ifndef NEURONRANK_ERROR_HPP_
#define NEURONRANK_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace neuronrank {

// Base of every error the library throws. `kind()` is a stable short name
// used by the CLI and the Python bindings.
class Error : public std::runtime_error {
 public:
  Error(const char* kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  const char* kind() const noexcept { return kind_; }

 private:
  const char* kind_;
};

#define NEURONRANK_DEFINE_ERROR(Name)                      \
  class Name : public Error {                              \
   public:                                                 \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  }

// core-data
NEURONRANK_DEFINE_ERROR(FormatError);
NEURONRANK_DEFINE_ERROR(DataError);
NEURONRANK_DEFINE_ERROR(IoError);
NEURONRANK_DEFINE_ERROR(AlignmentError);
NEURONRANK_DEFINE_ERROR(EmptyTaskError);
NEURONRANK_DEFINE_ERROR(EmptyClassError);
NEURONRANK_DEFINE_ERROR(SpecError);
// probes / rankings
NEURONRANK_DEFINE_ERROR(DegenerateTaskError);
NEURONRANK_DEFINE_ERROR(EmptySubsetError);
NEURONRANK_DEFINE_ERROR(IndexError);
NEURONRANK_DEFINE_ERROR(EmptyDatasetError);
NEURONRANK_DEFINE_ERROR(InsufficientDataError);
NEURONRANK_DEFINE_ERROR(NumericalError);
NEURONRANK_DEFINE_ERROR(SubsetMismatchError);
// probing evaluation
NEURONRANK_DEFINE_ERROR(GridMismatchError);
NEURONRANK_DEFINE_ERROR(NoEffectError);
NEURONRANK_DEFINE_ERROR(ClusterError);
// interventions
NEURONRANK_DEFINE_ERROR(RangeError);
NEURONRANK_DEFINE_ERROR(SameValueError);
NEURONRANK_DEFINE_ERROR(LexiconError);
// overlap statistics
NEURONRANK_DEFINE_ERROR(DimMismatchError);
NEURONRANK_DEFINE_ERROR(BudgetError);

#undef NEURONRANK_DEFINE_ERROR

}  // namespace neuronrank

#endif  // NEURONRANK_ERROR_HPP_
