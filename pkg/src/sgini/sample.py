"""Immutable observation batches and the S-Gini order parameter."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np
from numpy.typing import ArrayLike

from .errors import DataError, InsufficientSampleError, ParameterDomainError


class Sample:
    """A batch of strictly positive observations.

    The ascending order (stable, so ties keep their input order) and the
    mean are computed once and cached. Arrays handed out are read-only.

    Parameters
    ----------
    values : array_like
        One-dimensional positive, finite observations.
    """

    def __init__(self, values: ArrayLike):
        arr = np.array(values, dtype=np.float64).ravel()
        if arr.size == 0:
            raise InsufficientSampleError("a sample needs at least one observation")
        bad = ~np.isfinite(arr)
        if bad.any():
            raise DataError(f"non-finite value at position {int(np.argmax(bad))}")
        bad = arr <= 0
        if bad.any():
            i = int(np.argmax(bad))
            raise DataError(f"non-positive value {arr[i]!r} at position {i}")
        arr.setflags(write=False)
        order = np.argsort(arr, kind="stable")
        order.setflags(write=False)
        srt = arr[order]
        srt.setflags(write=False)
        self._values = arr
        self._order = order
        self._sorted = srt

    @classmethod
    def _from_trusted(cls, values: np.ndarray) -> "Sample":
        # skips validation; used for internally generated draws
        self = cls.__new__(cls)
        arr = np.ascontiguousarray(values, dtype=np.float64)
        arr.setflags(write=False)
        order = np.argsort(arr, kind="stable")
        srt = arr[order]
        srt.setflags(write=False)
        self._values, self._order, self._sorted = arr, order, srt
        return self

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def sorted(self) -> np.ndarray:
        return self._sorted

    @property
    def order(self) -> np.ndarray:
        """Permutation with ``values[order] == sorted``."""
        return self._order

    @property
    def n(self) -> int:
        return self._values.size

    @cached_property
    def total(self) -> float:
        return float(math.fsum(self._sorted))

    @cached_property
    def mean(self) -> float:
        return self.total / self.n

    @cached_property
    def is_constant(self) -> bool:
        return bool(self._sorted[0] == self._sorted[-1])

    def scaled(self, c: float) -> "Sample":
        return Sample(self._values * c)

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Sample(n={self.n}, mean={self.mean:.6g})"


@dataclass(frozen=True)
class SGiniOrder:
    """The S-Gini order ``nu``; ``nu == 2`` gives the classical Gini index.

    Any real ``nu > 0`` other than 1 is accepted; the U-statistic routines
    additionally call :meth:`require_integer`.
    """

    nu: float
    is_integer: bool = field(init=False)

    def __post_init__(self):
        nu = float(self.nu)
        if not math.isfinite(nu) or nu <= 0 or nu == 1:
            raise ParameterDomainError(f"S-Gini order must be > 0 and != 1, got {self.nu!r}")
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "is_integer", nu.is_integer())

    def require_integer(self) -> int:
        if not self.is_integer or self.nu < 2:
            raise ParameterDomainError(
                f"U-statistic estimators need an integer order >= 2, got {self.nu!r}"
            )
        return int(self.nu)

    def __int__(self) -> int:
        return self.require_integer()


def as_sample(x) -> Sample:
    return x if isinstance(x, Sample) else Sample(x)


def as_order(nu) -> SGiniOrder:
    return nu if isinstance(nu, SGiniOrder) else SGiniOrder(nu)


def require_size(sample: Sample, minimum: int, what: str) -> None:
    if sample.n < minimum:
        raise InsufficientSampleError(f"{what} needs n >= {minimum}, got n = {sample.n}")
