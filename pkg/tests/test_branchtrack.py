import numpy as np
import pytest

from kisspoly.branchtrack import continue_branch
from kisspoly.errors import BranchAmbiguityError, ValidationError
from kisspoly.geometry import Path

UPPER_SEMI = Path(tuple(np.exp(1j * np.linspace(0, np.pi, 17))))
FULL_CIRCLE = Path(tuple(np.exp(1j * np.linspace(0, 2 * np.pi, 33))))


def test_sqrt_upper_semicircle():
    track = continue_branch(lambda z: z, 2, UPPER_SEMI, 1.0)
    assert track.final_value == pytest.approx(1j, abs=1e-12)


def test_square_of_identity():
    seg = Path((1.0, 2.0))
    track = continue_branch(lambda z: z * z, 2, seg, 1.0)
    assert track.final_value == pytest.approx(2.0, abs=1e-12)


def test_monodromy_of_sqrt():
    track = continue_branch(lambda z: z, 2, FULL_CIRCLE, 1.0)
    assert track.final_value == pytest.approx(-1.0, abs=1e-10)


def test_quartic_monodromy():
    track = continue_branch(lambda z: z, 4, FULL_CIRCLE, 1.0)
    assert track.final_value == pytest.approx(1j, abs=1e-10)


def test_pointwise_power_invariant():
    track = continue_branch(lambda z: z ** 3 + 2.0, 2,
                            Path((0.0, 1.0 + 1.0j, 2.0j)), np.sqrt(2.0))
    for p, v in zip(track.points, track.values):
        assert v * v == pytest.approx(p ** 3 + 2.0, rel=1e-10)


def test_argument_continuity_invariant():
    track = continue_branch(lambda z: z, 2, FULL_CIRCLE, 1.0)
    vals = np.asarray(track.values)
    jumps = np.abs(np.angle(vals[1:] / vals[:-1]))
    assert np.max(jumps) < np.pi / 2


def test_bad_initial_value_rejected():
    with pytest.raises(ValidationError):
        continue_branch(lambda z: z, 2, Path((1.0, 2.0)), 0.7j)


def test_zero_on_path_rejected():
    with pytest.raises(BranchAmbiguityError):
        continue_branch(lambda z: z, 2, Path((1.0, -1.0)), 1.0)
