"""
Verification suites, keyed by the CLI command that runs them.
"""
from .dictionary_suite import DictionarySuite
from .gaussmanin_suite import GaussManinSuite
from .homalg_suite import HomalgSuite
from .pullback_suite import PullbackSuite
from .transfer_suite import TransferSuite
from .weyl_suite import WeylLawSuite

SUITES = {
    DictionarySuite.name: DictionarySuite,
    WeylLawSuite.name: WeylLawSuite,
    PullbackSuite.name: PullbackSuite,
    TransferSuite.name: TransferSuite,
    HomalgSuite.name: HomalgSuite,
    GaussManinSuite.name: GaussManinSuite,
}

__all__ = [
    'DictionarySuite',
    'GaussManinSuite',
    'HomalgSuite',
    'PullbackSuite',
    'TransferSuite',
    'WeylLawSuite',
    'SUITES',
]
