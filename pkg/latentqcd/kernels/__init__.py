from .kernel import RbfKernel, as_pairs, median_heuristic, rbf_eval
from .mmd import (
    KernelDiagnostics,
    ReferenceSet,
    block_pairs,
    build_reference,
    mmd,
    mmd_between_samples,
    second_order_samples,
)
