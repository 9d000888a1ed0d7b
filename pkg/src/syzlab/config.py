"""Global settings for syzlab."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional


def _bool_env(name: str, default: bool) -> bool:
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() in {"1", "true", "yes", "on"}


def _default_cache_dir() -> Path:
    return Path("~/.cache/syzlab").expanduser()


@dataclass
class SyzlabSettings:
    """Runtime knobs shared by every computation."""

    prime: int = 1009
    seed: int = 0
    trial_budget: int = 200
    wedge_cap: int = 10**6
    dense_fill: float = 0.3
    cache_dir: Path = field(default_factory=_default_cache_dir)
    use_cache: bool = True
    log_dir: Optional[Path] = None

    @classmethod
    def from_env(cls) -> "SyzlabSettings":
        cache_dir = os.getenv("SYZLAB_CACHE_DIR")
        log_dir = os.getenv("SYZLAB_LOG_DIR")
        return cls(
            prime=int(os.getenv("SYZLAB_PRIME", "1009")),
            seed=int(os.getenv("SYZLAB_SEED", "0")),
            trial_budget=int(os.getenv("SYZLAB_TRIAL_BUDGET", "200")),
            wedge_cap=int(os.getenv("SYZLAB_WEDGE_CAP", str(10**6))),
            dense_fill=float(os.getenv("SYZLAB_DENSE_FILL", "0.3")),
            cache_dir=Path(cache_dir).expanduser() if cache_dir else _default_cache_dir(),
            use_cache=_bool_env("SYZLAB_USE_CACHE", True),
            log_dir=Path(log_dir).expanduser() if log_dir else None,
        )
