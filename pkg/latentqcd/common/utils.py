import json
import math
from hashlib import sha224

import numpy as np


def hash_dict(d: dict[str, any], method: callable = sha224) -> str:
    """
    Returns a hash of a dictionary.

    Args:
        d (dict): The dictionary to hash.
        method (callable, optional): The hash function to use. Defaults to sha224.

    Returns:
        str: The hash of the dictionary.
    """
    return method(json.dumps(d, sort_keys=True).encode("utf-8")).hexdigest()


def derive_seed(master: int, *indices: int) -> int:
    """Derives a 64-bit seed from a master seed and an index path, e.g. (cell, run).

    The result only depends on the arguments, so serial and parallel executions draw identical streams.

    Args:
        master (int): The master seed.
        *indices (int): Index path below the master seed.

    Returns:
        int: A seed in [0, 2**64).
    """
    sequence = np.random.SeedSequence([int(master), *[int(i) for i in indices]])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def ensure_finite(values: np.ndarray | float, what: str = "value") -> None:
    """Raises `NonFiniteValueError` if any entry is NaN or infinite."""
    from .errors import NonFiniteValueError

    if not np.all(np.isfinite(values)):
        raise NonFiniteValueError(f"Non-finite {what} encountered")


def exact_mean(values: np.ndarray) -> float:
    """Mean with compensated summation, independent of the order of `values`."""
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise ValueError("Mean of an empty array")
    return math.fsum(values) / values.size


def standard_error(values: np.ndarray) -> float:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(values.size))
