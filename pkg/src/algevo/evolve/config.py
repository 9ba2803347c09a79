from __future__ import annotations

from dataclasses import asdict, dataclass, field

STRATEGY_KINDS = (
    "uniform",
    "bdm",
    "local_bdm",
    "entropy_linear",
    "entropy_exp",
    "block_entropy_linear",
    "block_entropy_exp",
)

TABLE_KINDS = ("bdm", "local_bdm")


@dataclass(frozen=True)
class Strategy:
    """How mutation candidates are weighted.

    ``block_size`` is the side of the submatrices used by ``local_bdm``
    and by the block-entropy kinds.  ``bdm_block_size`` is the block side
    of the BDM itself; ``None`` picks the table's natural block side.
    """

    kind: str = "uniform"
    epsilon: float = 1e-10
    block_size: int = 4
    bdm_block_size: int | None = None

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ValueError(f"unknown strategy {self.kind!r}; expected one of {STRATEGY_KINDS}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.block_size < 1:
            raise ValueError("block_size must be positive")
        if self.bdm_block_size is not None and self.bdm_block_size < 1:
            raise ValueError("bdm_block_size must be positive")

    @property
    def needs_table(self) -> bool:
        return self.kind in TABLE_KINDS


@dataclass(frozen=True)
class EvolutionConfig:
    shifts: int = 1
    replacement: bool = False
    extinction_threshold: int = 2500
    alpha: float = 0.0
    seed: int = 0
    strategy: Strategy = field(default_factory=Strategy)

    def __post_init__(self):
        if isinstance(self.strategy, str):
            object.__setattr__(self, "strategy", Strategy(self.strategy))
        if self.shifts < 1:
            raise ValueError("shifts must be a positive integer")
        if self.extinction_threshold < 1:
            raise ValueError("extinction_threshold must be >= 1")
        if not self.alpha >= 0:
            raise ValueError("alpha must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")

    def check_size(self, n: int):
        if self.shifts > n * n:
            raise ValueError(f"shifts={self.shifts} exceeds the {n * n} bits of the matrix")
        s = self.strategy
        if s.kind in ("local_bdm", "block_entropy_linear", "block_entropy_exp") and n % s.block_size:
            raise ValueError(f"block_size {s.block_size} does not divide matrix size {n}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "EvolutionConfig":
        d = dict(d)
        d["strategy"] = Strategy(**d.get("strategy", {}))
        return cls(**d)
