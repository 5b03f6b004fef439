"""Run configuration shared by the global partitioner and the oracle."""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import asdict, dataclass, field, replace

from .separator import PRACTICAL, THEORY, SeparatorConfig


class ConfigError(ValueError):
    pass


HEADS = True
TAILS = False


def coin(seed: int, iteration: int, anchor: int) -> bool:
    """Fair keyed coin for the component anchored at ``anchor`` in round
    ``iteration``. True is Heads.

    BLAKE2b keyed with the 64-bit seed acts as the pseudo-random function,
    so the outcome depends on (seed, iteration, anchor) and nothing else.
    """
    key = struct.pack("<Q", seed & 0xFFFFFFFFFFFFFFFF)
    msg = struct.pack("<QQ", iteration, anchor)
    return bool(hashlib.blake2b(msg, key=key, digest_size=8).digest()[0] & 1)


def theory_ell(epsilon: float, c1: float) -> int:
    """Smallest round count with c1 * (1 - 1/(8 c1))**(l / (16 c1 - 2)) <= eps/3,
    via the bound ln(1/(1-x)) >= x."""
    return math.ceil((16 * c1 - 2) * 8 * c1 * math.log(3 * c1 / epsilon))


PRACTICAL_RHO = 0.8
PRACTICAL_K_CAP = 4096


def practical_ell(epsilon: float, c1: float = 3.0, rho: float = PRACTICAL_RHO) -> int:
    """Rounds until c1 * rho**l <= eps/2, with rho an empirically calibrated
    per-round weight shrinkage (planar grids and triangulations shrink by
    0.82-0.89 per round; c1 overstates their edge density)."""
    return max(1, math.ceil(math.log(2 * c1 / epsilon) / math.log(1 / rho)))


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one partitioning run.

    Build it with :meth:`create`, which derives ``ell``, ``gamma``, ``k``
    and ``k_final`` from epsilon and the mode; direct construction is
    validated against gamma = epsilon / (3 ell).
    """

    epsilon: float
    d: int
    c1: float
    sep: SeparatorConfig
    ell: int
    gamma: float
    k: int
    k_final: int
    seed: int = 0
    mode: str = PRACTICAL
    extras: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not 0 < self.epsilon <= 1:
            raise ConfigError("epsilon must lie in (0, 1]")
        if self.ell < 1:
            raise ConfigError("ell must be >= 1")
        if not math.isclose(self.gamma, self.epsilon / (3 * self.ell), rel_tol=1e-12):
            raise ConfigError(f"gamma must equal epsilon/(3*ell) = {self.epsilon / (3 * self.ell)}, got {self.gamma}")
        if self.k < 1 or self.k_final < 1:
            raise ConfigError("k and k_final must be >= 1")
        if self.mode not in (THEORY, PRACTICAL):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.sep.mode != self.mode:
            raise ConfigError("separator mode must match run mode")

    @classmethod
    def create(
        cls,
        epsilon: float,
        d: int,
        *,
        seed: int = 0,
        mode: str = PRACTICAL,
        c1: float = 3.0,
        h: int = 5,
        c_sep: float = 1.0,
        c2: float | None = None,
        ell: int | None = None,
        k: int | None = None,
        k_final: int | None = None,
        rho: float = PRACTICAL_RHO,
    ) -> RunConfig:
        """Derive a consistent configuration.

        Theory mode: ell from the success-rate bound, k = ceil(c2 d^2/gamma^2),
        k_final = ceil(3 c2 d^2/eps^2). Practical mode: ell from
        :func:`practical_ell`, k capped at ``k`` (default 4096), and
        k_final = 3 k unless given.
        """
        if not 0 < epsilon <= 1:
            raise ConfigError("epsilon must lie in (0, 1]")
        k_cap = k if k is not None else PRACTICAL_K_CAP
        sep = SeparatorConfig(h=h, c_sep=c_sep, c2=c2, mode=mode, k_cap=k_cap)
        extras = {}
        if ell is None:
            if mode == THEORY:
                ell = theory_ell(epsilon, c1)
            else:
                ell = practical_ell(epsilon, c1, rho)
                extras["rho"] = rho
        gamma = epsilon / (3 * ell)
        k_eff = sep.k_of(gamma, d)
        if k_final is None:
            k_final = math.ceil(3 * sep.c2 * d * d / epsilon**2) if mode == THEORY else 3 * k_eff
        return cls(epsilon, d, c1, sep, ell, gamma, k_eff, k_final, seed, mode, extras)

    def with_seed(self, seed: int) -> RunConfig:
        return replace(self, seed=seed)

    @property
    def final_trigger(self) -> float:
        """Parts larger than this are split in the final refinement."""
        return self.k_final / 3

    def needs_final_split(self, size: int) -> bool:
        return 3 * size > self.k_final

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("extras")
        return out
