"""
Validator turning JSON input documents into rings, connections, maps and families.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Mapping, Sequence, Tuple, Union

from ..core.errors import DModuleError, SchemaError
from ..core.logger import get_logger
from ..dmodules.conn import Connection
from ..dmodules.exactalg import LocRing
from ..dmodules.gaussmanin import Family
from ..dmodules.pullback import PolyMap

logger = get_logger(__name__)


def _require(document: Mapping[str, Any], key: str, kind: Union[type, Tuple[type, ...]], where: str) -> Any:
    if not isinstance(document, Mapping):
        raise SchemaError(f"{where}: expected an object, got {type(document).__name__}")
    if key not in document:
        raise SchemaError(f"{where}: missing field '{key}'")
    value = document[key]
    if not isinstance(value, kind):
        expected = " or ".join(k.__name__ for k in kind) if isinstance(kind, tuple) else kind.__name__
        raise SchemaError(f"{where}: field '{key}' must be {expected}, got {type(value).__name__}")
    return value


def _strings(values: Sequence[Any], where: str) -> List[str]:
    result = []
    for value in values:
        if isinstance(value, bool) or not isinstance(value, (str, int)):
            raise SchemaError(f"{where}: expected polynomial strings, got {value!r}")
        result.append(str(value))
    return result


def _matrix(rows: Any, rank: int, where: str) -> List[List[str]]:
    if not isinstance(rows, list) or len(rows) != rank:
        raise SchemaError(f"{where}: expected {rank} rows")
    matrix = []
    for row in rows:
        if not isinstance(row, list) or len(row) != rank:
            raise SchemaError(f"{where}: expected rows of length {rank}")
        matrix.append(_strings(row, where))
    return matrix


class SchemaValidator:
    """
    Validates input documents and builds the domain objects they describe.

    Every failure, structural or algebraic, surfaces as SchemaError so the
    CLI reports it as an input error.
    """

    def __init__(self, debug: bool = False):
        """
        Initialize the validator.

        Args:
            debug: Debug mode for logging
        """
        self.debug = debug

    def load(self, path: str) -> Dict[str, Any]:
        """
        Read a JSON document.

        Raises:
            SchemaError: If the file is missing or not valid JSON
        """
        file_path = Path(path)
        try:
            with file_path.open(encoding='utf-8') as handle:
                document = json.load(handle)
        except FileNotFoundError as e:
            logger.error(f"Input file not found: {path}")
            raise SchemaError(f"Input file not found: {path}") from e
        except json.JSONDecodeError as e:
            logger.error(f"Invalid JSON in {path}: {e}")
            raise SchemaError(f"Invalid JSON in {path}: {e}") from e
        if not isinstance(document, dict):
            raise SchemaError(f"{path}: top level must be an object")
        if self.debug:
            logger.debug(f"Loaded {path} with fields {sorted(document)}")
        return document

    def ring(self, document: Mapping[str, Any], where: str = 'ring') -> LocRing:
        variables = _strings(_require(document, 'vars', list, where), where)
        denominators = _strings(document.get('denominators', []), where)
        try:
            return LocRing(variables, denominators)
        except DModuleError as e:
            logger.error(f"{where}: {e}")
            raise SchemaError(f"{where}: {e}") from e

    def connection(self, document: Mapping[str, Any], where: str = 'connection') -> Connection:
        """
        { "vars", "denominators", "rank", "matrices": { var: [[...]] } }; missing
        directions are zero.
        """
        ring = self.ring(document, where)
        rank = _require(document, 'rank', int, where)
        if rank < 1:
            raise SchemaError(f"{where}: rank must be positive")
        matrices = document.get('matrices', {})
        if not isinstance(matrices, Mapping):
            raise SchemaError(f"{where}: 'matrices' must be an object keyed by variable")
        unknown = set(matrices) - set(ring.variables)
        if unknown:
            raise SchemaError(f"{where}: matrices for unknown variables {sorted(unknown)}")
        try:
            return Connection(ring, rank, {v: _matrix(M, rank, f"{where}.matrices.{v}")
                                           for v, M in matrices.items()})
        except DModuleError as e:
            logger.error(f"{where}: {e}")
            raise SchemaError(f"{where}: {e}") from e

    def poly_map(self, document: Mapping[str, Any], where: str = 'map') -> PolyMap:
        """{ "source": ring, "target": ring, "components": [...] }."""
        source = self.ring(_require(document, 'source', dict, where), f"{where}.source")
        target = self.ring(_require(document, 'target', dict, where), f"{where}.target")
        components = _strings(_require(document, 'components', list, where), where)
        try:
            return PolyMap(source, target, components)
        except DModuleError as e:
            logger.error(f"{where}: {e}")
            raise SchemaError(f"{where}: {e}") from e

    def pullback_input(self, document: Mapping[str, Any], where: str = 'map') -> Tuple[PolyMap, Connection]:
        """A map document carrying the target connection under "connection"."""
        f = self.poly_map(document, where)
        C = self.connection(_require(document, 'connection', dict, where), f"{where}.connection")
        if C.ring != f.target:
            raise SchemaError(f"{where}: connection lives over {C.ring!r} but the map targets {f.target!r}")
        return f, C

    def family(self, document: Mapping[str, Any], where: str = 'family') -> Family:
        """
        { "h", "fiber_var", "base_var", "base_denominators", "rank", "A_x", "A_lam", "name" };
        only "h" is required.
        """
        h = _require(document, 'h', (str, int), where)
        rank = document.get('rank', 1)
        if not isinstance(rank, int) or rank < 1:
            raise SchemaError(f"{where}: rank must be a positive integer")
        twist = {}
        for key in ('A_x', 'A_lam'):
            if key in document:
                twist[key] = _matrix(document[key], rank, f"{where}.{key}")
        try:
            return Family(
                str(h),
                fiber_var=document.get('fiber_var', 'x'),
                base_var=document.get('base_var', 'lam'),
                base_denominators=_strings(document.get('base_denominators', []), where),
                rank=rank,
                name=document.get('name'),
                **twist,
            )
        except DModuleError as e:
            logger.error(f"{where}: {e}")
            raise SchemaError(f"{where}: {e}") from e

    def entries(self, document: Mapping[str, Any], plural: str) -> List[Dict[str, Any]]:
        """A document holding a list under ``plural`` or a single entry."""
        if plural in document:
            items = document[plural]
            if not isinstance(items, list) or not items:
                raise SchemaError(f"'{plural}' must be a non-empty list")
            return items
        return [document]
