"""Experiment configuration and the plain ``key = value`` config-file reader."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError
from .models import ModelSpec
from .overlap import DEFAULT_CUTOFF, DEFAULT_FLOOR_LOG10, DEFAULT_THRESHOLD_LOG10


def parse_indices(text) -> tuple[int, ...]:
    """Parse ``"1,2"``, ``"1-10"`` or ``"1-3,7"`` into 1-based state indices."""
    if isinstance(text, (list, tuple)):
        return tuple(int(x) for x in text)
    out = []
    for part in str(text).replace(" ", "").split(","):
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValidationError(f"empty range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    return tuple(out)


def read_config_file(path) -> dict[str, str]:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


@dataclass
class ExperimentConfig:
    model: ModelSpec
    bundle_a: tuple = (1,)
    bundle_b: tuple = (1,)
    bond: int | None = None
    cutoff: float = DEFAULT_CUTOFF
    threshold_log10: float = DEFAULT_THRESHOLD_LOG10
    floor_log10: float = DEFAULT_FLOOR_LOG10
    output_dir: Path = field(default_factory=lambda: Path("out"))
    cache: bool = True

    def __post_init__(self):
        self.bundle_a = parse_indices(self.bundle_a)
        self.bundle_b = parse_indices(self.bundle_b)
        self.output_dir = Path(self.output_dir)
        dim = self.model.dim
        for name, bundle in (("bundle_a", self.bundle_a), ("bundle_b", self.bundle_b)):
            if not bundle:
                raise ValidationError(f"{name} is empty")
            bad = [k for k in bundle if not 1 <= k <= dim]
            if bad:
                raise ValidationError(f"{name}: state indices {bad} outside 1..{dim}")
        n = self.model.sites
        if self.bond is None:
            self.bond = n // 2
        if not 1 <= self.bond <= n - 1:
            raise ValidationError(f"bond {self.bond} outside 1..{n - 1}")
        if self.cutoff <= 0:
            raise ValidationError("cutoff must be positive")
