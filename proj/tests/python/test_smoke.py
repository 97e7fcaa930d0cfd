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

import itertools
import json
import os
import pathlib
import subprocess
from fractions import Fraction

import numpy as np
import pytest

import neuronrank as nr

FIXTURE = pathlib.Path(__file__).resolve().parent.parent / "data" / "planted.synth"


def test_expected_overlap_values():
    assert nr.expected_overlap(768, 100, 2) == pytest.approx(13.0208, abs=5e-3)
    assert nr.expected_overlap(768, 100, 3) == pytest.approx(1.6954, abs=5e-3)
    assert nr.expected_overlap_fraction(10, 3, 2) == Fraction(9, 10)
    assert nr.expected_overlap_fraction(768, 100, 2) == Fraction(10000, 768)
    with pytest.raises(nr.Error, match="BudgetError"):
        nr.expected_overlap_recurrence(768, 100, 2)


def test_overlap_fraction_matches_enumeration():
    n, m = 5, 2
    subsets = list(itertools.combinations(range(n), m))
    total = sum(len(set(a) & set(b)) for a in subsets for b in subsets)
    expected = Fraction(total, len(subsets) ** 2)
    assert nr.expected_overlap_fraction(n, m, 2) == expected
    assert nr.expected_overlap_recurrence(n, m, 2) == expected


def test_nrt1_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    values = rng.normal(size=(7, 5)).astype(np.float32)
    values[0, 0] = -0.0
    values[1, 1] = np.float32(1e-40)
    path = tmp_path / "x.nrt"
    nr.write_repr_file(values, path)
    back = nr.read_repr_file(path)
    assert back.dtype == np.float32
    assert back.tobytes() == values.tobytes()


def test_planted_neurons_rank_first():
    data = nr.paradigm(d=32, planted=[3, 8, 20], noise_sigma=0.1, tokens=600, seed=2)
    planted = set(data["planted"])
    for ranking in (
        nr.probeless_rank(data["train"]),
        nr.linear_rank(data["train"], lr=0.1, epochs=30),
        nr.gaussian_greedy_rank(data["train"], data["dev"], 4)[0],
    ):
        assert set(ranking.top(3)) == planted
        assert nr.reverse(ranking).order == ranking.order[::-1]


def test_topk_curve_orders_variants():
    data = nr.paradigm(d=32, planted=[1, 2, 3, 4], noise_sigma=0.3, tokens=800, seed=4)
    ttb = nr.probeless_rank(data["train"])
    args = (data["train"], data["dev"], data["test"], "gaussian")
    top = nr.topk_curve(*args, ttb, [4])["accuracies"][0]
    bottom = nr.topk_curve(*args, nr.reverse(ttb), [4])["accuracies"][0]
    assert top >= bottom + 0.3


def test_wilcoxon_and_errors():
    assert nr.wilcoxon([1, 2, 3, 4, 5], [0] * 5, "greater")["p_value"] == 0.03125
    with pytest.raises(nr.Error, match="NoEffectError"):
        nr.wilcoxon([1, 2], [1, 2])


def test_intervention_helpers():
    alpha = nr.translation_coefficients(16, 8.0)
    assert alpha[0] == 8.0 and alpha[-1] == 0.0
    assert nr.saturation_point([0.10, 0.20, 0.30, 0.31, 0.315, 0.312])[0] == 2
    r = nr.random_rank(4, 1)
    h = [1.0, 2.0, 3.0, 4.0]
    out = nr.ablate(h, r, 2)
    assert [out[j] for j in r.order[2:]] == [h[j] for j in r.order[2:]]
    assert all(out[j] == 0.0 for j in r.order[:2])


@pytest.mark.skipif("NEURONRANK_CLI" not in os.environ, reason="command-line tool not built")
def test_cli_rank_matches_library(tmp_path):
    cli = os.environ["NEURONRANK_CLI"]
    subprocess.run([cli, "synth", "--spec", str(FIXTURE), "--out", str(tmp_path / "data")],
                   check=True, capture_output=True)
    subprocess.run([cli, "rank", "--data", str(tmp_path / "data"), "--attribute", "Number",
                    "--method", "probeless", "--out", str(tmp_path / "r")],
                   check=True, capture_output=True)
    train = nr.load_dataset(tmp_path / "data" / "train.nrt", tmp_path / "data" / "train.tsv",
                            "Number")
    written = json.loads((tmp_path / "r" / "probeless.ttb.json").read_text())
    assert written["order"] == nr.probeless_rank(train).order
    assert nr.read_ranking(tmp_path / "r" / "probeless.ttb.json").order == written["order"]
