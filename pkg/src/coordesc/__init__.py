"""Block coordinate descent: update schemes, index rules, proximal operators and test problems."""
from . import errors, numeric, problems, prox, schemes, selection, subdiff
from .numeric import BlockPartition, FlopCounter, cf_ratio, make_block_partition
from .schemes import BlockUpdater, SchemeConfig, run_stochastic
from .selection import make_rule, next_index

__version__ = "0.1.0"

__all__ = [
    "errors", "numeric", "problems", "prox", "schemes", "selection", "subdiff",
    "BlockPartition", "FlopCounter", "cf_ratio", "make_block_partition",
    "BlockUpdater", "SchemeConfig", "run_stochastic", "make_rule", "next_index",
]
