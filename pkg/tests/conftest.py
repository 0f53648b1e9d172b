import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


class RecordingObjective:
    """Objective wrapper helper: remembers every evaluated value vector."""

    def __init__(self, fn):
        self.fn = fn
        self.seen = []

    def __call__(self, values):
        self.seen.append(np.array(values))
        return self.fn(values)


class ScriptedLoss:
    """Returns preset losses in call order, then repeats the last one."""

    def __init__(self, losses):
        self.losses = list(losses)
        self.calls = 0

    def __call__(self, values):
        loss = self.losses[min(self.calls, len(self.losses) - 1)]
        self.calls += 1
        return loss
