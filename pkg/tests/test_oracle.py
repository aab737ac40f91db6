"""Library semantics against the brute-force reference evaluator."""

import numpy as np
import pytest

from agodd import contains, coverage, find_gaps
from agodd.semantics import Cause

import oracle

CASES_PER_CHUNK = 125
CHUNKS = 8  # 1000 randomized cases in total


def check_case(rng, odd) -> None:
    for _ in range(3):
        sample = oracle.random_sample(rng, odd)
        ok, causes = oracle.reference_contains(odd, sample)
        m = contains(odd, sample)
        assert m.included == ok, sample
        assert {(r.path, r.cause.value) for r in m.reasons} == causes, sample
        assert m.included == (not m.reasons)

    scenarios = oracle.random_scenarios(rng, odd)
    grid = oracle.random_grid(rng, odd)
    odd_cells, covered = oracle.reference_grid(odd, scenarios, grid)
    report = coverage(odd, scenarios, grid)
    assert report.total_cells == int(odd_cells.sum())
    assert report.covered_cells == int(covered.sum())
    expected = covered.sum() / odd_cells.sum() if odd_cells.sum() else 0.0
    assert report.overall == pytest.approx(expected, abs=0, rel=1e-12)

    gaps = find_gaps(odd, scenarios, grid)
    boxes = oracle.gap_cells(odd, gaps, grid)
    union = np.zeros_like(odd_cells)
    for g, box in zip(gaps, boxes):
        assert not (union & box).any(), "gaps overlap"
        assert g.cells == int(box.sum()) > 0
        union |= box
    if odd_cells.sum():
        assert np.array_equal(union, odd_cells & ~covered)
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            assert not oracle.mergeable(boxes[i], boxes[j]), "gaps not maximal"


@pytest.mark.parametrize("chunk", range(CHUNKS))
def test_semantics_match_reference(chunk):
    for rng, odd in oracle.cases(1000 + chunk, CASES_PER_CHUNK):
        check_case(rng, odd)


def test_generator_exercises_all_causes():
    seen = set()
    for rng, odd in oracle.cases(7, 300):
        _, causes = oracle.reference_contains(odd, oracle.random_sample(rng, odd))
        seen |= {c for _, c in causes}
    assert seen == {c.value for c in Cause}
