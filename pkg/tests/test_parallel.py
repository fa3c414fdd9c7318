"""Tests for parallel module."""

import numpy as np

from slag.parallel import chunk_indices, run_parallel


def seeded_draw(seed: int, indices: np.ndarray) -> list[float]:
    return [float(np.random.default_rng([seed, int(i)]).random()) for i in indices]


class TestChunkIndices:
    def test_empty(self):
        assert chunk_indices(0) == []

    def test_covers_range_in_order(self):
        chunks = chunk_indices(600)

        assert len(chunks) == 3
        assert np.array_equal(np.concatenate(chunks), np.arange(600))

    def test_small_count(self):
        chunks = chunk_indices(5, chunk_size=2)

        assert [len(c) for c in chunks] == [2, 2, 1]


class TestRunParallel:
    def test_serial(self):
        assert run_parallel(pow, [(2, 3), (3, 2)]) == [8, 9]

    def test_threads_keep_order(self):
        tasks = [(11, chunk) for chunk in chunk_indices(40, chunk_size=7)]

        serial = run_parallel(seeded_draw, tasks, workers=1)
        threaded = run_parallel(seeded_draw, tasks, workers=3)

        assert threaded == serial

    def test_no_tasks(self):
        assert run_parallel(pow, [], workers=4) == []
