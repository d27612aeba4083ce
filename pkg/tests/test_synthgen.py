from __future__ import annotations

import numpy as np
import pytest

from mask2inst import Lcg, PlacementError, SceneSpec, connected_components, generate


def test_lcg_deterministic_and_documented():
    a = Lcg(42)
    b = Lcg(42)
    seq_a = [a.next_u64() for _ in range(5)]
    seq_b = [b.next_u64() for _ in range(5)]
    assert seq_a == seq_b
    assert all(0.0 <= Lcg(7).uniform() < 1.0 for _ in range(100))


def test_lcg_randint_range():
    rng = Lcg(9)
    values = {rng.randint(2, 5) for _ in range(200)}
    assert values == {2, 3, 4, 5}


def test_spec_validation():
    with pytest.raises(ValueError):
        SceneSpec(64, 64, "weird", 1, 0.0, 1)
    with pytest.raises(ValueError):
        SceneSpec(64, 64, "round", -1, 0.0, 1)
    with pytest.raises(ValueError):
        SceneSpec(64, 64, "round", 1, 1.0, 1)


def test_generate_empty_scene():
    mask, count, truth = generate(SceneSpec(64, 64, "round", 0, 0.0, 3))
    assert count == 0
    assert mask.foreground_count() == 0
    assert truth.count == 0


def test_generate_disjoint_at_zero_overlap():
    for seed in range(5):
        mask, count, truth = generate(SceneSpec(96, 96, "round", 2, 0.0, 100 + seed))
        assert count == 2
        assert connected_components(mask, 8).count == 2


def test_generate_round_overlap_fuses():
    # with heavy overlap two discs land close enough to fuse into a dumbbell
    mask, count, truth = generate(SceneSpec(96, 96, "round", 2, 0.4, seed=5001))
    assert count == 2
    assert connected_components(mask, 8).count == 1


def test_generate_deterministic():
    spec = SceneSpec(112, 112, "mixed", 6, 0.35, seed=77)
    m1, c1, t1 = generate(spec)
    m2, c2, t2 = generate(spec)
    assert c1 == c2
    assert np.array_equal(m1.data, m2.data)
    assert np.array_equal(t1.data, t2.data)


def test_true_count_ignores_fusion():
    for seed in (11, 12, 13):
        spec = SceneSpec(112, 112, "round", 5, 0.4, seed=seed)
        mask, count, truth = generate(spec)
        assert count == 5
        assert truth.count == 5
        assert connected_components(mask, 8).count <= 5


def test_truth_partitions_mask():
    spec = SceneSpec(112, 112, "elongated", 6, 0.35, seed=21)
    mask, count, truth = generate(spec)
    assert np.array_equal(truth.data > 0, mask.data)


def test_all_regimes_generate():
    for regime in ("round", "elongated", "ring", "dense_points", "mixed"):
        mask, count, truth = generate(SceneSpec(128, 128, regime, 4, 0.2, seed=31))
        assert count == 4
        assert mask.foreground_count() > 0


def test_placement_error_reports_achieved():
    with pytest.raises(PlacementError) as err:
        generate(SceneSpec(48, 48, "round", 40, 0.0, seed=1))
    assert err.value.requested == 40
    assert 0 <= err.value.placed < 40
