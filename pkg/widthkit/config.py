import os
import logging

from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)

# -------------------- Helpers --------------------

def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}, using {default}")
        return default

# -------------------- Budgets --------------------

# exhaustive layout search over at most this many elements
BUDGET_N = _int_env("WIDTHKIT_BUDGET_N", 9)

# layouts enumerated when realizing canonical trajectories
FULLSET_BUDGET = _int_env("WIDTHKIT_FULLSET_BUDGET", 8)

# pivot-orbit BFS over at most this many vertices
ORBIT_BUDGET = _int_env("WIDTHKIT_ORBIT_BUDGET", 8)

# largest compact-trajectory set we are willing to materialize
COMPACT_LIMIT = _int_env("WIDTHKIT_COMPACT_LIMIT", 200_000)

# spans up to this ambient dimension are checked vector by vector
SPAN_EXHAUST_DIM = _int_env("WIDTHKIT_SPAN_EXHAUST_DIM", 5)
SPAN_SAMPLES = _int_env("WIDTHKIT_SPAN_SAMPLES", 512)

# -------------------- Runtime --------------------

SEED = _int_env("WIDTHKIT_SEED", 20211)
WORKERS = _int_env("WIDTHKIT_WORKERS", 1)
LOG_LEVEL = os.getenv("WIDTHKIT_LOG_LEVEL", "INFO").upper()

VERSION = "0.4.0"

# -------------------- Worker hand-off --------------------

# loky workers re-import this module and would see only the .env values
SHARED = ("BUDGET_N", "FULLSET_BUDGET", "ORBIT_BUDGET", "COMPACT_LIMIT", "SPAN_EXHAUST_DIM", "SPAN_SAMPLES", "SEED")


def snapshot() -> dict[str, int]:
    return {name: globals()[name] for name in SHARED}


def restore(values: dict[str, int]):
    for name, value in values.items():
        if name not in SHARED:
            raise KeyError(f"not a shared setting: {name}")
        globals()[name] = value
