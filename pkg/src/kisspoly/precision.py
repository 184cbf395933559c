"""Working-precision control.

Everything in the toolkit runs in ordinary double precision by default.
The moment/polynomial/quadrature layer is the one place where doubles
genuinely run out (Hankel-type systems for degrees beyond ~25), so those
routines accept an optional ``dps`` argument: ``None`` means numpy doubles,
an integer means mpmath arbitrary precision with that many significant
digits.  ``EXTENDED_DPS`` (30 digits minimum per the design target; we use
50 for headroom) is the standard extended mode engaged automatically when a
conditioning diagnostic crosses ``AUTO_ESCALATE_COND``.

The environment variable ``KISSPOLY_PRECISION`` selects the default mode
for the command-line tools: ``double`` or ``extended[:dps]``.
"""

import os

import mpmath as mp

EXTENDED_DPS = 50
AUTO_ESCALATE_COND = 1e8


def resolve_dps(dps):
    """Normalize a precision request to None (double) or an int >= 30."""
    if dps is None:
        return None
    dps = int(dps)
    if dps < 30:
        raise ValueError("extended mode needs at least 30 significant digits")
    return dps


def default_mode_from_env():
    """Read KISSPOLY_PRECISION; returns None for double, an int dps otherwise."""
    raw = os.environ.get("KISSPOLY_PRECISION", "double").strip().lower()
    if raw in ("", "double", "float64"):
        return None
    if raw.startswith("extended"):
        _, _, tail = raw.partition(":")
        return resolve_dps(tail) if tail else EXTENDED_DPS
    raise ValueError(f"unrecognized KISSPOLY_PRECISION value: {raw!r}")


class workdps:
    """Context manager wrapping mpmath.workdps that tolerates dps=None."""

    def __init__(self, dps):
        self._dps = dps
        self._ctx = mp.workdps(dps) if dps is not None else None

    def __enter__(self):
        if self._ctx is not None:
            self._ctx.__enter__()
        return self

    def __exit__(self, *exc):
        if self._ctx is not None:
            return self._ctx.__exit__(*exc)
        return False


def to_mpc(x):
    return mp.mpc(x)


def to_complex(x):
    return complex(x)
