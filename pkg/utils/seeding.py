# utils/seeding.py
import numpy as np


def derive_seed(*parts: int) -> int:
    """Stable 32-bit seed from a tuple of integers, e.g. (base seed, epoch)."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])
