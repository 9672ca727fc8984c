import numpy as np

from ..common.errors import InvalidSpecError
from .chain import stationary_distribution
from .spec import ErrorPath, HmmSpec, LatentMode


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if seed < 0 or seed >= 2**64:
        raise InvalidSpecError(f"Seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def _draw_initial(P: np.ndarray, rng: np.random.Generator) -> int:
    pi = stationary_distribution(P)
    return int(rng.random() >= pi[0])


def _sample_modes(
    P: np.ndarray, length: int, init: int, rng: np.random.Generator
) -> np.ndarray:
    """Samples `length` modes of the chain as alternating runs of geometric length."""
    # run length in mode i is Geometric(P[i, 1 - i]) with support {1, 2, ...}
    chunk = int(length * max(P[0, 1], P[1, 0])) // 2 + 16
    runs: list[np.ndarray] = []
    total = 0
    while total < length:
        stay_l = rng.geometric(P[0, 1], size=chunk)
        stay_h = rng.geometric(P[1, 0], size=chunk)
        lengths = np.empty(2 * chunk, dtype=np.int64)
        if init == 0:
            lengths[0::2], lengths[1::2] = stay_l, stay_h
        else:
            lengths[0::2], lengths[1::2] = stay_h, stay_l
        runs.append(lengths)
        total += int(lengths.sum())
    lengths = np.concatenate(runs)
    run_modes = ((init + np.arange(lengths.size)) % 2).astype(np.int8)
    return np.repeat(run_modes, lengths)[:length]


def _sample_errors(
    spec: HmmSpec, modes: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    errors = np.empty(modes.size, dtype=float)
    for mode in LatentMode:
        index = modes == mode
        count = int(index.sum())
        if count:
            errors[index] = spec.emission(mode).sample(rng, count)
    return errors


def sample_path(
    spec: HmmSpec,
    length: int,
    seed: int,
    init: LatentMode | None = None,
) -> ErrorPath:
    """Simulates an error stream of the hidden Markov error process.

    Args:
        spec (HmmSpec): The error process.
        length (int): Number of time steps, at least 1.
        seed (int): Unsigned 64-bit seed, the same seed reproduces the path bit-exactly.
        init (LatentMode | None, optional): Mode of the first step. Drawn from the stationary
            distribution when omitted.

    Returns:
        ErrorPath: Modes and errors of the simulated stream.
    """
    if length < 1:
        raise InvalidSpecError(f"Path length must be positive, got {length}")
    seed = _check_seed(seed)
    rng = np.random.default_rng(seed)
    P = spec.P
    start = _draw_initial(P, rng) if init is None else int(init)
    modes = _sample_modes(P, length, start, rng)
    errors = _sample_errors(spec, modes, rng)
    return ErrorPath(modes=modes, errors=errors, seed=seed)


def sample_changed_path(
    pre: HmmSpec,
    post: HmmSpec,
    changepoint: int,
    length: int,
    seed: int,
    mode_before_change: LatentMode | None = None,
) -> ErrorPath:
    """Simulates a stream whose distribution changes at the 1-based time step `changepoint`.

    Steps `1 .. changepoint - 1` follow `pre`, steps from `changepoint` on follow `post`. The latent
    chain continues across the change: the first post-change mode is drawn from the post-change
    transition row of the last pre-change mode. With `mode_before_change` the pre-change segment is
    conditioned to end in that mode. Two-state chains are reversible, so the conditioned stationary
    segment is sampled backwards from its fixed last mode.

    Args:
        pre (HmmSpec): Pre-change error process.
        post (HmmSpec): Post-change error process.
        changepoint (int): First post-change time step, at least 1.
        length (int): Total number of time steps.
        seed (int): Unsigned 64-bit seed.
        mode_before_change (LatentMode | None, optional): Mode at `changepoint - 1`. For
            `changepoint == 1` it acts as the mode preceding the stream.

    Returns:
        ErrorPath: The stream, with `changepoint` recorded.
    """
    if changepoint < 1:
        raise InvalidSpecError(f"Changepoint must be at least 1, got {changepoint}")
    if length < 1:
        raise InvalidSpecError(f"Path length must be positive, got {length}")
    seed = _check_seed(seed)
    rng = np.random.default_rng(seed)

    n_pre = min(changepoint - 1, length)
    pre_modes = np.empty(0, dtype=np.int8)
    if mode_before_change is not None:
        last_pre = int(mode_before_change)
        if n_pre:
            pre_modes = _sample_modes(pre.P, n_pre, last_pre, rng)[::-1].copy()
    elif n_pre:
        pre_modes = _sample_modes(pre.P, n_pre, _draw_initial(pre.P, rng), rng)
        last_pre = int(pre_modes[-1])
    else:
        last_pre = _draw_initial(pre.P, rng)

    n_post = length - n_pre
    post_modes = np.empty(0, dtype=np.int8)
    if n_post > 0:
        first_post = int(rng.random() >= post.P[last_pre, 0])
        post_modes = _sample_modes(post.P, n_post, first_post, rng)

    errors = np.concatenate(
        [_sample_errors(pre, pre_modes, rng), _sample_errors(post, post_modes, rng)]
    )
    return ErrorPath(
        modes=np.concatenate([pre_modes, post_modes]).astype(np.int8),
        errors=errors,
        seed=seed,
        changepoint=changepoint,
    )
