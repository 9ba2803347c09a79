"""CTM tables, BDM and entropy estimates of algorithmic complexity."""
from .bdm import bdm, bdm_candidates, bdm_delta, bdm_terms, block_codes, block_strings, resolve_block_size
from .ctm import CtmTable, build_ctm_table, ctm_lookup, default_table, default_table_path
from .entropy import bit_entropy, block_entropy
from .turing import TuringMachineSpec, machine_count, run_machine

__all__ = [
    "CtmTable",
    "TuringMachineSpec",
    "bdm",
    "bdm_candidates",
    "bdm_delta",
    "bdm_terms",
    "bit_entropy",
    "block_codes",
    "block_entropy",
    "block_strings",
    "build_ctm_table",
    "ctm_lookup",
    "default_table",
    "default_table_path",
    "machine_count",
    "resolve_block_size",
    "run_machine",
]
