import math

import numpy as np
import pytest

from lnopt.attack import AttackConfig, attack_dataset, attack_one, attack_rows
from lnopt.detectors import BuiltinToyDetector, Detector
from lnopt.images import Image, generate_synthetic_fakes


class ConstantDetector(Detector):
    def __init__(self, value):
        super().__init__()
        self.value = value

    def _score(self, pixels):
        return self.value


class MeanPixelDetector(Detector):
    """Sigmoid of the pixel mean: fake iff mean > 0.5 (steep slope)."""

    def __init__(self, slope=400.0):
        super().__init__()
        self.slope = slope

    def _score(self, pixels):
        z = max(-500.0, min(500.0, self.slope * (float(pixels.mean()) - 0.5)))
        return 1.0 / (1.0 + math.exp(-z))


def _flat_image(mean, shape=(8, 8, 3), ident="flat"):
    return Image(np.full(shape, mean), id=ident)


def test_unbeatable_detector_exhausts_budget():
    det = ConstantDetector(0.9)
    cfg = AttackConfig(algo="lognormal", budget=50, linf=0.03)
    res = attack_one(_flat_image(0.6), det, cfg, seed=0)
    assert res.success is False
    assert res.queries_used == 50
    assert res.final_score == 0.9


def test_mean_pixel_detector_toy_closed_form():
    # image mean 0.52 with L=0.03: pushing most coordinates to -L crosses 0.5;
    # the sign transform finds that in a handful of generations
    det = MeanPixelDetector()
    img = _flat_image(0.52)
    cfg = AttackConfig(algo="g-lognormal", budget=1500, linf=0.03)
    res = attack_one(img, det, cfg, seed=1)
    assert res.success
    assert res.queries_used < 1200
    assert res.initial_score > 0.99
    pert = res.perturbation
    assert set(np.round(np.unique(pert), 6)) <= {-0.03, 0.0, 0.03}
    assert pert.mean() < -0.015  # mostly the -L corner


def test_perturbation_linf_and_clamp_invariants():
    det = BuiltinToyDetector(0)
    images = [img for img in generate_synthetic_fakes(12, seed=4) if det.score(img.pixels) >= 0.5]
    for algo in ("rs", "lognormal", "algo1", "g-lognormal", "sm-lognormal"):
        cfg = AttackConfig(algo=algo, budget=60, linf=0.03)
        res = attack_one(images[0], det, cfg, seed=7)
        assert res.perturbation is not None
        assert np.max(np.abs(res.perturbation)) <= 0.03  # exact bound
        applied = np.clip(images[0].pixels + res.perturbation, 0.0, 1.0)
        assert applied.min() >= 0.0 and applied.max() <= 1.0


def test_early_stop_at_first_threshold_crossing():
    det = BuiltinToyDetector(0)
    img = _flat_image(0.5, ident="any")
    score = det.score(img.pixels)
    # choose a threshold just above the clean score: the very first query wins
    cfg = AttackConfig(algo="rs", budget=100, linf=0.03, threshold=score + 1e-6)
    res = attack_one(img, det, cfg, seed=0)
    assert res.success and res.queries_used == 1


def test_no_early_stop_exhausts_budget():
    det = BuiltinToyDetector(0)
    img = _flat_image(0.5)
    score = det.score(img.pixels)
    cfg = AttackConfig(algo="rs", budget=40, linf=0.03, threshold=score + 1e-6, early_stop=False)
    res = attack_one(img, det, cfg, seed=0)
    assert res.success and res.queries_used == 40


def test_query_accounting_exact():
    det = BuiltinToyDetector(1)
    img = generate_synthetic_fakes(1, seed=9)[0]
    before = det.query_count
    cfg = AttackConfig(algo="lognormal", budget=75, linf=0.02)
    res = attack_one(img, det, cfg, seed=3)
    assert det.query_count - before == res.queries_used


def test_budget_monotone_success_exact():
    # early stopping makes the B=150 query sequence a prefix of the B=600 one
    det = BuiltinToyDetector(0)
    images = generate_synthetic_fakes(10, seed=11)
    flagged = [img for img in images if det.score(img.pixels) >= 0.5]
    for img in flagged:
        small = attack_one(img, det, AttackConfig(algo="algo1", budget=150), seed=5)
        large = attack_one(img, det, AttackConfig(algo="algo1", budget=600), seed=5)
        if small.success:
            assert large.success
            assert large.queries_used == small.queries_used


def test_attack_determinism():
    det = BuiltinToyDetector(0)
    img = generate_synthetic_fakes(1, seed=2)[0]
    cfg = AttackConfig(algo="algo1", budget=120, linf=0.03)
    a = attack_one(img, det, cfg, seed=8)
    b = attack_one(img, det, cfg, seed=8)
    assert a.final_score == b.final_score and a.queries_used == b.queries_used
    assert np.array_equal(a.perturbation, b.perturbation)


def test_attack_dataset_filters_and_rates():
    det = ConstantDetector(0.2)  # nothing is flagged as fake
    images = generate_synthetic_fakes(4, seed=0)
    cfg = AttackConfig(algo="rs", budget=10)
    summary = attack_dataset(images, det, cfg, seed=0)
    assert summary.attacked == 0 and summary.skipped == 4
    assert summary.success_rate is None
    assert all(r.skipped for r in summary.results)


def test_attack_dataset_counts():
    det = BuiltinToyDetector(0)
    images = generate_synthetic_fakes(10, seed=0)
    cfg = AttackConfig(algo="algo1", budget=250, linf=0.03)
    summary = attack_dataset(images, det, cfg, seed=1)
    flagged = sum(1 for img in images if BuiltinToyDetector(0).score(img.pixels) >= 0.5)
    assert summary.attacked == flagged
    assert summary.skipped == 10 - flagged
    assert len(summary.results) == 10
    if summary.attacked:
        assert summary.success_rate == summary.successes / summary.attacked


def test_attack_dataset_parallel_equals_serial():
    images = generate_synthetic_fakes(6, seed=5)
    cfg = AttackConfig(algo="lognormal", budget=80, linf=0.03)
    serial = attack_dataset(images, BuiltinToyDetector(3), cfg, seed=2)
    parallel = attack_dataset(
        images, None, cfg, seed=2, parallelism=2, detector_factory=lambda: BuiltinToyDetector(3)
    )
    for a, b in zip(serial.results, parallel.results):
        assert (a.image_id, a.success, a.queries_used, a.final_score) == (
            b.image_id, b.success, b.queries_used, b.final_score
        )


def test_attack_rows_include_skipped_images():
    det = ConstantDetector(0.2)
    images = generate_synthetic_fakes(3, seed=0)
    cfg = AttackConfig(algo="rs", budget=10)
    summary = attack_dataset(images, det, cfg, seed=0)
    rows = attack_rows(summary, cfg, seed=0)
    assert len(rows) == 3  # one row per input image, skipped included
    assert all(",false," in r for r in rows)


def test_attack_config_validation():
    with pytest.raises(ValueError):
        AttackConfig(linf=0.0)
    with pytest.raises(ValueError):
        AttackConfig(budget=0)
    from lnopt.registry import UnknownAlgorithmError

    with pytest.raises(UnknownAlgorithmError):
        AttackConfig(algo="nope")


# --- builtin toy detector ---


def test_builtin_detector_deterministic():
    img = generate_synthetic_fakes(1, seed=0)[0]
    assert BuiltinToyDetector(5).score(img.pixels) == BuiltinToyDetector(5).score(img.pixels)
    assert BuiltinToyDetector(5).score(img.pixels) != BuiltinToyDetector(6).score(img.pixels)


def test_builtin_detector_scores_strictly_inside_unit_interval():
    det = BuiltinToyDetector(0)
    rng = np.random.default_rng(0)
    for _ in range(50):
        s = det.score(rng.random((64, 64, 3)))
        assert 0.0 < s < 1.0
    extreme = np.ones((64, 64, 3))
    assert 0.0 < det.score(extreme) < 1.0


def test_builtin_detector_flags_about_half_of_synthetic_images():
    det = BuiltinToyDetector(0)
    images = generate_synthetic_fakes(1000, seed=0)
    frac = np.mean([det.score(img.pixels) >= 0.5 for img in images])
    assert 0.4 <= frac <= 0.6


def test_builtin_detector_rejects_tiny_images():
    from lnopt.detectors import DetectorError

    det = BuiltinToyDetector(0)
    with pytest.raises(DetectorError):
        det.score(np.zeros((4, 4, 3)))
