"""Periodic functions built from chosen-plaintext superposition queries.

Three constructions, each returning a :class:`PeriodicFunctionHandle`:

* 4-round FBC-F: plaintexts (c0, alpha_b, x, c3); f(x) XORs ciphertext
  words 1 and 3 over b = 0, 1.
* 4-round FBC-KF: same plaintexts and output map against the KF variant.
* 6-round FBC-FK: plaintexts (alpha_b^c3, F_1^1(alpha_b^c3)^c0,
  c3^F_2^1(c0^x), c0^x); f(x) XORs F_1^6(y1^y3)^y2 over b = 0, 1.

For a genuine instance each f has a key-dependent period; Simon's algorithm
finds it, which is what separates the cipher from a random permutation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from .cipher import State4, Variant
from .oracle import Oracle, PeriodicFunctionHandle, PublicFunctions
from .simon import SimonConfig, simon_run


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DistinguisherConfig:
    alpha0: int
    alpha1: int
    c0: int
    c3: int

    def __post_init__(self):
        if self.alpha0 == self.alpha1:
            raise ConfigError("alpha0 and alpha1 must differ")

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "DistinguisherConfig":
        a0, a1, c0, c3 = (int(v) for v in rng.integers(0, 1 << n, size=4))
        while a1 == a0:
            a1 = int(rng.integers(0, 1 << n))
        return cls(a0, a1, c0, c3)

    @property
    def alphas(self) -> tuple[int, int]:
        return self.alpha0, self.alpha1


@dataclass(frozen=True)
class Verdict:
    decision: str  # "CIPHER" or "RANDOM"
    found_period: Optional[int]
    rounds_used: int
    degenerate: bool = False
    multiple: bool = False


def _full(x: np.ndarray, value: int) -> np.ndarray:
    return np.full(np.shape(x), value, dtype=np.int64)


def fbc4_plaintexts(cfg: DistinguisherConfig, alpha: int, x: np.ndarray) -> State4:
    return State4(_full(x, cfg.c0), _full(x, alpha), x, _full(x, cfg.c3))


def fbc4_output(ct: State4) -> np.ndarray:
    """x_1^4 ^ x_3^4, which equals x_0^3."""
    return ct.x1 ^ ct.x3


def fbcfk6_plaintexts(F, cfg: DistinguisherConfig, alpha: int, x: np.ndarray) -> State4:
    head = alpha ^ cfg.c3
    x0 = _full(x, head)
    x1 = _full(x, F(1, 1, head) ^ cfg.c0)
    return State4(x0, x1, cfg.c3 ^ F(1, 2, cfg.c0 ^ x), cfg.c0 ^ x)


def fbcfk6_output(F, ct: State4) -> np.ndarray:
    """F_1^6(y1 ^ y3) ^ y2, which equals x_0^4 ^ k_1^6."""
    return F(6, 1, ct.x1 ^ ct.x3) ^ ct.x2


def _build_fbc4(oracle: Oracle, cfg: DistinguisherConfig, tag: str) -> PeriodicFunctionHandle:
    def builder(access):
        def f(x):
            out = 0
            for alpha in cfg.alphas:
                out = out ^ fbc4_output(access.encrypt(fbc4_plaintexts(cfg, alpha, x)))
            return out
        return f
    return oracle.query_superposed(builder, tag)


def build_f_fbcf_4r(oracle: Oracle, cfg: DistinguisherConfig) -> PeriodicFunctionHandle:
    return _build_fbc4(oracle, cfg, "fbc-f-4r")


def build_f_fbckf_4r(oracle: Oracle, cfg: DistinguisherConfig) -> PeriodicFunctionHandle:
    return _build_fbc4(oracle, cfg, "fbc-kf-4r")


def build_f_fbcfk_6r(oracle: Oracle, cfg: DistinguisherConfig) -> PeriodicFunctionHandle:
    F = PublicFunctions(oracle.family, oracle.counter)

    def builder(access):
        def f(x):
            out = 0
            for alpha in cfg.alphas:
                ct = access.encrypt(fbcfk6_plaintexts(F, cfg, alpha, x))
                out = out ^ fbcfk6_output(F, ct)
            return out
        return f
    return oracle.query_superposed(builder, "fbc-fk-6r")


# structure name -> (variant, rounds, builder)
STRUCTURES: Dict[str, tuple[Variant, int, Callable]] = {
    "fbc-f-4r": (Variant.FBC_F, 4, build_f_fbcf_4r),
    "fbc-kf-4r": (Variant.FBC_KF, 4, build_f_fbckf_4r),
    "fbc-fk-6r": (Variant.FBC_FK, 6, build_f_fbcfk_6r),
}


def structure_for(variant) -> str:
    variant = Variant(variant)
    for name, (v, _, _) in STRUCTURES.items():
        if v is variant:
            return name
    raise ConfigError(f"no distinguisher for {variant.value}")


def distinguish(oracle: Oracle, cfg: DistinguisherConfig, simon_cfg: SimonConfig | None,
                rng: np.random.Generator, structure: str | None = None) -> Verdict:
    """CIPHER iff Simon confirms a period of the structure's f."""
    structure = structure or structure_for(oracle.params.variant)
    if structure not in STRUCTURES:
        raise ConfigError(f"unknown structure {structure!r}")
    handle = STRUCTURES[structure][2](oracle, cfg)
    result = simon_run(handle, oracle.n, simon_cfg or SimonConfig(), rng)
    decision = "CIPHER" if result.period is not None else "RANDOM"
    return Verdict(decision, result.period, result.rounds_used, result.degenerate, result.multiple)
