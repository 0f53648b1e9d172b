import pytest

from lnopt.registry import (
    ALIASES,
    ParsedAlgorithm,
    UnknownAlgorithmError,
    build_optimizer,
    known_ids,
    parse_algorithm_id,
)
from lnopt.space import SearchSpace


def test_base_ids_parse_clean():
    for base in ("lognormal", "big-lognormal", "huge-lognormal", "small-lognormal",
                 "x-lognormal", "xsmall-lognormal", "rs", "adaptive", "lengler",
                 "anisotropic", "one-fifth-es"):
        parsed = parse_algorithm_id(base)
        assert parsed == ParsedAlgorithm(base, None, None)


def test_modifier_prefix_composition():
    parsed = parse_algorithm_id("gsm-supersmooth-lognormal")
    assert parsed.base == "lognormal"
    assert parsed.loss_mod == "gsm"
    assert parsed.smooth_frequency == pytest.approx(1 / 9)
    assert parse_algorithm_id("zetasmooth-rs").smooth_frequency == 0.5
    assert parse_algorithm_id("ultrasmooth-rs").smooth_frequency == pytest.approx(1 / 3)
    assert parse_algorithm_id("smooth-rs").smooth_frequency == pytest.approx(1 / 55)
    assert parse_algorithm_id("g-adaptive").loss_mod == "g"
    assert parse_algorithm_id("sm-lengler").loss_mod == "sm"


def test_small_lognormal_not_eaten_by_sm_prefix():
    parsed = parse_algorithm_id("small-lognormal")
    assert parsed.base == "small-lognormal" and parsed.loss_mod is None


def test_aliases_resolve_to_modifier_stacks():
    expected = {
        "algo1": ("lognormal", 1 / 9, "gsm"),
        "algo2": ("lognormal", 1 / 9, "g"),
        "algo3": ("lognormal", 1 / 9, None),
        "algo4": ("lognormal", None, None),
        "algo5": ("big-lognormal", None, "gsm"),
        "algo6": ("big-lognormal", None, "g"),
    }
    assert set(ALIASES) == set(expected)
    for alias, (base, freq, mod) in expected.items():
        parsed = parse_algorithm_id(alias)
        assert parsed.base == base and parsed.loss_mod == mod
        if freq is None:
            assert parsed.smooth_frequency is None
        else:
            assert parsed.smooth_frequency == pytest.approx(freq)


def test_unknown_id_lists_registry():
    with pytest.raises(UnknownAlgorithmError) as err:
        parse_algorithm_id("simulated-annealing")
    msg = str(err.value)
    for known in ("lognormal", "rs", "lengler", "algo1"):
        assert known in msg


def test_double_modifier_rejected():
    with pytest.raises(UnknownAlgorithmError):
        parse_algorithm_id("g-g-lognormal")
    with pytest.raises(UnknownAlgorithmError):
        parse_algorithm_id("smooth-smooth-rs")


def test_oln_reserved():
    with pytest.raises(UnknownAlgorithmError) as err:
        parse_algorithm_id("oln")
    assert "reserved" in str(err.value)


def test_build_optimizer_stack():
    from lnopt.modifiers import SmoothedOptimizer
    from lnopt.optimizers import LogNormalOptimizer

    space = SearchSpace.real_box(0, 1, 16, shape=(4, 4))
    opt = build_optimizer(parse_algorithm_id("supersmooth-lognormal"), space, seed=0)
    assert isinstance(opt, SmoothedOptimizer)
    assert isinstance(opt.inner, LogNormalOptimizer)
    plain = build_optimizer(parse_algorithm_id("lognormal"), space, seed=0)
    assert isinstance(plain, LogNormalOptimizer)


def test_wrapping_does_not_shift_base_stream():
    # same seed: the wrapped stack's inner optimizer gets the same stream
    space = SearchSpace.real_box(0, 1, 16, shape=(4, 4))
    a = build_optimizer(parse_algorithm_id("lognormal"), space, seed=9)
    b = build_optimizer(parse_algorithm_id("supersmooth-lognormal"), space, seed=9)
    assert a.rng.random() == b.inner.rng.random()


def test_known_ids_sorted_and_complete():
    ids = known_ids()
    assert ids == sorted(ids[:len(ids) - 6]) + sorted(ids[-6:])
    assert "lognormal" in ids and "algo6" in ids
