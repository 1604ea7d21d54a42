"""Market and return-model containers shared by sampling, portfolio and robustness."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mixing import MixingLaw, law_from_dict, law_to_dict


class ModelError(ValueError):
    """Invalid NMVM model or market parameters."""


def check_spd(matrix: np.ndarray, name: str = "a_matrix") -> np.ndarray:
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ModelError(f"{name} must be square, got shape {m.shape}")
    if not np.allclose(m, m.T, rtol=0.0, atol=1e-12):
        raise ModelError(f"{name} is not symmetric")
    try:
        np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        raise ModelError(f"{name} is not positive definite") from None
    return m


@dataclass(frozen=True, eq=False)
class NmvmModel:
    """Return vector ``X = mu + gamma Z + sqrt(Z) A N`` with ``N ~ N(0, I)``."""

    mu: np.ndarray
    gamma_vec: np.ndarray
    a_matrix: np.ndarray
    law: MixingLaw

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        gv = np.atleast_1d(np.asarray(self.gamma_vec, dtype=float))
        am = check_spd(np.atleast_2d(np.asarray(self.a_matrix, dtype=float)))
        if not (mu.shape == gv.shape == (am.shape[0],)):
            raise ModelError(
                f"dimension mismatch: mu {mu.shape}, gamma {gv.shape}, A {am.shape}"
            )
        for arr in (mu, gv, am):
            arr.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "gamma_vec", gv)
        object.__setattr__(self, "a_matrix", am)

    @property
    def dim(self) -> int:
        return self.mu.size

    @property
    def sigma(self) -> np.ndarray:
        return self.a_matrix @ self.a_matrix.T

    def replace(self, **changes) -> "NmvmModel":
        fields = {"mu": self.mu, "gamma_vec": self.gamma_vec, "a_matrix": self.a_matrix, "law": self.law}
        fields.update(changes)
        return NmvmModel(**fields)

    def to_dict(self) -> dict:
        return {
            "mu": self.mu.tolist(),
            "gamma": self.gamma_vec.tolist(),
            "a_matrix": self.a_matrix.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict, law: MixingLaw | dict) -> "NmvmModel":
        if isinstance(law, dict):
            law = law_from_dict(law)
        return cls(doc["mu"], doc["gamma"], doc["a_matrix"], law)


@dataclass(frozen=True)
class MarketSpec:
    """Risk-free rate, exponential-utility risk aversion ``a`` and initial wealth."""

    r_f: float
    a: float = 1.0
    w0: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.r_f):
            raise ModelError("r_f must be finite")
        if not self.a > 0:
            raise ModelError(f"risk aversion must be positive, got {self.a!r}")
        if not self.w0 > 0:
            raise ModelError(f"initial wealth must be positive, got {self.w0!r}")

    def to_dict(self) -> dict:
        return {"r_f": self.r_f, "a": self.a, "w0": self.w0}


def model_document(model: NmvmModel) -> dict:
    return {"model": model.to_dict(), "law": law_to_dict(model.law)}
