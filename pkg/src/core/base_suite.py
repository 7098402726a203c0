"""
Abstract base class for all verification suites.
Defines the template method pattern for seeded property and oracle checks.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Hashable, Iterable, List, Optional

from .constants import Limits, ReportKeys, SATURATION_DISCLAIMER
from .logger import get_logger

logger = get_logger(__name__)

Mapper = Callable[[Callable, Iterable], Iterable]


@dataclass
class CheckResult:
    """Outcome of one named identity on one instance (or aggregated over many)."""
    name: str
    passed: bool
    detail: Any = None
    witness: Any = None
    stuck: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        result = {ReportKeys.NAME: self.name, ReportKeys.PASSED: self.passed, ReportKeys.DETAIL: self.detail}
        if self.witness is not None:
            result[ReportKeys.WITNESS] = self.witness
        if self.stuck is not None:
            result['stuck'] = self.stuck
        return result


@dataclass
class SuiteResult:
    suite: str
    checks: List[CheckResult]
    caps: Dict[str, int]
    seed: int
    elapsed: float = 0.0
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failed_checks(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    @property
    def stuck(self) -> Optional[Dict[str, Any]]:
        """Certificate of the first stuck reduction, if any."""
        for check in self.checks:
            if check.stuck is not None:
                return check.stuck
        return None

    def to_dict(self) -> Dict[str, Any]:
        """Canonical report content; timing is left out so reruns are byte-identical."""
        return {
            ReportKeys.SUITE: self.suite,
            ReportKeys.PASSED: self.passed,
            ReportKeys.SEED: self.seed,
            ReportKeys.CAPS: dict(self.caps),
            ReportKeys.CHECKS: [check.to_dict() for check in self.checks],
            **self.extra,
            ReportKeys.DISCLAIMER: SATURATION_DISCLAIMER,
        }


class BaseSuite(ABC):
    """
    Abstract base class for verification suites.

    Template Method Pattern: run() enumerates instance keys, checks every
    instance (through an optional mapper, e.g. a process pool's map) and
    aggregates the per-instance results. Instance keys must be picklable and
    cheap; check_instance() rebuilds the algebraic objects from the key.
    """

    name: str = 'suite'

    def __init__(self, seed: int = Limits.DEFAULT_SEED, degree_cap: int = Limits.DEFAULT_DEGREE_CAP,
                 order_cap: int = Limits.DEFAULT_ORDER_CAP, count: Optional[int] = None,
                 inputs: Optional[List[Dict[str, Any]]] = None, debug: bool = False):
        """
        Initialize the suite.

        Args:
            seed: Seed for every random instance
            degree_cap: Truncation degree cap
            order_cap: Operator order cap
            count: Random suite size (defaults to the acceptance size of the suite)
            inputs: Parsed JSON documents; when given they replace the random instances
            debug: Enable debug mode for detailed logging
        """
        self.seed = seed
        self.degree_cap = degree_cap
        self.order_cap = order_cap
        self.count = count
        self.inputs = inputs
        self.debug = debug

    @property
    def caps(self) -> Dict[str, int]:
        return {'degree_cap': self.degree_cap, 'order_cap': self.order_cap}

    def run(self, mapper: Optional[Mapper] = None) -> SuiteResult:
        """
        Template method: enumerate, check, aggregate.

        Args:
            mapper: map-like callable used to check instances (defaults to builtin map)

        Returns:
            SuiteResult with one aggregated CheckResult per identity
        """
        keys = list(self.build_instances())
        if self.debug:
            logger.debug(f"[{self.__class__.__name__}] Instances: {len(keys)}")

        mapper = mapper or map
        per_instance = list(mapper(self.check_instance, keys))
        checks = self.aggregate([check for group in per_instance for check in group])

        if self.debug:
            failed = sum(1 for check in checks if not check.passed)
            logger.debug(f"[{self.__class__.__name__}] Checks: {len(checks)}, failed: {failed}")

        return self.format_output(checks)

    def aggregate(self, results: List[CheckResult]) -> List[CheckResult]:
        """
        Merge results sharing a name, keeping first-seen order.

        A name seen once keeps its own detail; repeated names collapse to
        {'instances', 'failed'} with the first failing witness.
        """
        groups: Dict[str, List[CheckResult]] = {}
        for result in results:
            groups.setdefault(result.name, []).append(result)
        merged = []
        for name, group in groups.items():
            if len(group) == 1:
                merged.append(group[0])
                continue
            failures = [r for r in group if not r.passed]
            first = failures[0] if failures else None
            merged.append(CheckResult(
                name=name,
                passed=not failures,
                detail={'instances': len(group), 'failed': len(failures)},
                witness=first.witness if first else None,
                stuck=next((r.stuck for r in failures if r.stuck is not None), None),
            ))
        return merged

    def format_output(self, checks: List[CheckResult]) -> SuiteResult:
        """Wrap checks into a SuiteResult; subclasses may add report sections."""
        return SuiteResult(self.name, checks, self.caps, self.seed)

    def instance_count(self, default: int) -> int:
        return self.count if self.count is not None else default

    # Abstract methods that subclasses must implement

    @abstractmethod
    def build_instances(self) -> Iterable[Hashable]:
        """
        Enumerate picklable instance keys.

        Returns:
            Iterable of keys understood by check_instance()
        """
        pass

    @abstractmethod
    def check_instance(self, key: Hashable) -> List[CheckResult]:
        """
        Rebuild one instance and check every identity on it.

        Args:
            key: Instance key from build_instances()

        Returns:
            One CheckResult per identity
        """
        pass
