"""
Report exporter for run reports.
Writes canonical JSON, or a text rendering that follows the JSON field order.
"""
import json
from typing import Any, Dict, List

from ..core.logger import get_logger

logger = get_logger(__name__)

INDENT = '  '


class ReportExporter:
    """
    Serializes run reports. Both formats are pure functions of the report
    dictionary, so identical runs give byte-identical files.
    """

    def to_json(self, report: Dict[str, Any]) -> str:
        return json.dumps(report, indent=2, ensure_ascii=False) + '\n'

    def to_text(self, report: Dict[str, Any]) -> str:
        """
        Render nested dictionaries as indented 'key: value' lines and lists as
        '- item' lines, keeping insertion order.
        """
        lines: List[str] = []
        self._render(report, 0, lines)
        return '\n'.join(lines) + '\n'

    def render(self, report: Dict[str, Any], output_format: str) -> str:
        if output_format == 'text':
            return self.to_text(report)
        return self.to_json(report)

    def export(self, report: Dict[str, Any], output_path: str, output_format: str = 'json') -> None:
        """
        Write the report to a file.

        Args:
            report: Run report dictionary
            output_path: Destination file
            output_format: 'json' or 'text'

        Raises:
            RuntimeError: If the file cannot be written
        """
        try:
            with open(output_path, 'w', encoding='utf-8') as handle:
                handle.write(self.render(report, output_format))
        except OSError as e:
            logger.error(f"Failed to write report: {output_path} - {str(e)}")
            raise RuntimeError(f"Cannot write report: {str(e)}") from e

    def _render(self, value: Any, depth: int, lines: List[str]) -> None:
        pad = INDENT * depth
        if isinstance(value, dict):
            for key, item in value.items():
                if self._is_scalar(item):
                    lines.append(f"{pad}{key}: {self._scalar(item)}")
                else:
                    lines.append(f"{pad}{key}:")
                    self._render(item, depth + 1, lines)
        elif isinstance(value, list):
            if not value:
                lines.append(f"{pad}[]")
            for item in value:
                if self._is_scalar(item):
                    lines.append(f"{pad}- {self._scalar(item)}")
                elif self._is_flat_list(item):
                    lines.append(f"{pad}- [{', '.join(self._scalar(x) for x in item)}]")
                else:
                    lines.append(f"{pad}-")
                    self._render(item, depth + 1, lines)
        else:
            lines.append(f"{pad}{self._scalar(value)}")

    @staticmethod
    def _is_scalar(value: Any) -> bool:
        return not isinstance(value, (dict, list))

    def _is_flat_list(self, value: Any) -> bool:
        return isinstance(value, list) and all(self._is_scalar(x) for x in value)

    @staticmethod
    def _scalar(value: Any) -> str:
        if value is None:
            return 'null'
        if isinstance(value, bool):
            return 'true' if value else 'false'
        return str(value)
