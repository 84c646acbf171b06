from dfci.custody.ledger import (
    GENESIS_HASH,
    CustodyAction,
    CustodyChain,
    CustodyEntry,
    EntryDraft,
    VerifyCheck,
    VerifyResult,
    append_entry,
    canonical_string,
    dump_chain,
    dumps_chain,
    load_chain,
    loads_chain,
    open_chain,
    verify_chain,
)
from dfci.custody.coverage import CoverageGap, CoverageReport, DigestMismatch, check_custody_coverage, cross_check_digests

__all__ = [
    'GENESIS_HASH', 'CustodyAction', 'CustodyChain', 'CustodyEntry', 'EntryDraft',
    'VerifyCheck', 'VerifyResult', 'append_entry', 'canonical_string',
    'dump_chain', 'dumps_chain', 'load_chain', 'loads_chain', 'open_chain', 'verify_chain',
    'CoverageGap', 'CoverageReport', 'DigestMismatch', 'check_custody_coverage', 'cross_check_digests',
]
