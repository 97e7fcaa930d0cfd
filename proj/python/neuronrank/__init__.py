# Copyright 2026 The NeuronRank Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Neuron importance rankings, probing evaluation and interventions."""

from fractions import Fraction

from ._neuronrank import *  # noqa: F401,F403
from ._neuronrank import Error
from ._neuronrank import expected_overlap_closed_exact as _closed_exact
from ._neuronrank import expected_overlap_exact as _recurrence_exact

__all__ = ["Error", "expected_overlap_fraction", "expected_overlap_recurrence"]


def expected_overlap_fraction(n, m, i):
    """Exact expected top-m overlap of i random rankings of n neurons."""
    return Fraction(_closed_exact(n, m, i))


def expected_overlap_recurrence(n, m, i):
    """The same expectation from the counting recurrence; n is capped at 64."""
    return Fraction(_recurrence_exact(n, m, i))
