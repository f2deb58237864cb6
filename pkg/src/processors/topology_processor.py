"""
Topology Processor

Parses and validates topology documents and smooths link loss statistics.

Author: VGNCF Toolkit
Date: 2026-10-19
"""

import json
import logging
import re
from typing import Dict, List, Optional, Tuple

from dateutil.parser import isoparse

from src.storage.models import GeoLink, GeoNode, Role

logger = logging.getLogger(__name__)

_WHITESPACE = re.compile(r'\s*')


class TopologyValidationError(ValueError):
    """Raised when a topology document is rejected; carries every diagnostic."""

    def __init__(self, diagnostics: List[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("Invalid topology document:\n  " + "\n  ".join(self.diagnostics))


class TopologyProcessor:
    """
    Processes topology documents for the link database.

    Features:
    - JSON parsing with line-numbered diagnostics
    - Node and link validation
    - Referential integrity checks
    - EWMA smoothing of link loss rates
    """

    def parse_document(self, text: str) -> Tuple[List[GeoNode], List[GeoLink]]:
        """
        Parse and validate a topology document.

        Args:
            text: JSON document with "nodes" and "links" arrays

        Returns:
            Tuple of (nodes, links)

        Raises:
            TopologyValidationError: With one diagnostic per problem found
        """
        try:
            document = json.loads(text) if text.strip() else {}
        except json.JSONDecodeError as e:
            raise TopologyValidationError([f"line {e.lineno}: invalid JSON: {e.msg}"])

        if not isinstance(document, dict):
            raise TopologyValidationError(["line 1: document must be a JSON object"])

        errors = []
        node_items = document.get('nodes', [])
        link_items = document.get('links', [])
        for key, items in (('nodes', node_items), ('links', link_items)):
            if not isinstance(items, list):
                errors.append(f"line {self._key_line(text, key)}: {key} must be an array")
        if errors:
            raise TopologyValidationError(errors)

        node_spans = self._element_spans(text, 'nodes')
        link_spans = self._element_spans(text, 'links')

        nodes = []
        seen_nodes = set()
        for i, item in enumerate(node_items):
            where = f"nodes[{i}]"
            span = node_spans[i] if i < len(node_spans) else None
            is_valid, problems = self.validate_node_data(item)
            if not is_valid:
                errors.extend(self._locate(text, span, where, field, msg) for field, msg in problems)
                continue
            if item['id'] in seen_nodes:
                errors.append(self._locate(text, span, where, 'id', f"duplicate node id {item['id']!r}"))
                continue
            seen_nodes.add(item['id'])
            nodes.append(GeoNode(id=item['id'], lat=float(item['lat']), lon=float(item['lon']),
                                 role=Role(item.get('role', Role.RELAY.value)),
                                 nc_capable=bool(item.get('nc_capable', True))))

        links = []
        seen_links = set()
        for i, item in enumerate(link_items):
            where = f"links[{i}]"
            span = link_spans[i] if i < len(link_spans) else None
            is_valid, problems = self.validate_link_data(item)
            if not is_valid:
                errors.extend(self._locate(text, span, where, field, msg) for field, msg in problems)
                continue
            dangling = [end for end in ('src', 'dst') if item[end] not in seen_nodes]
            for end in dangling:
                errors.append(self._locate(text, span, where, end, f"unknown node {item[end]!r}"))
            if dangling:
                continue
            key = (item['src'], item['dst'])
            if key in seen_links:
                errors.append(self._locate(text, span, where, 'src', f"duplicate link {key[0]}->{key[1]}"))
                continue
            seen_links.add(key)
            links.append(GeoLink(src=item['src'], dst=item['dst'], delta=float(item['delta']),
                                 samples=int(item.get('samples', 0)),
                                 updated_at=self.normalize_timestamp(item.get('updated_at'))))

        if errors:
            raise TopologyValidationError(errors)

        logger.info(f"Parsed topology with {len(nodes)} nodes and {len(links)} links")
        return nodes, links

    def validate_node_data(self, data: Dict) -> Tuple[bool, List[Tuple[str, str]]]:
        """
        Validate a node entry.

        Args:
            data: Node dict from the document

        Returns:
            Tuple of (is_valid, list of (field, message))
        """
        if not isinstance(data, dict):
            return False, [('', 'node entry must be an object')]

        problems = []
        if not isinstance(data.get('id'), str) or not data.get('id'):
            problems.append(('id', 'node id must be a non-empty string'))

        for field, bound in (('lat', 90.0), ('lon', 180.0)):
            value = data.get(field)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                problems.append((field, f"{field} must be a number"))
            elif not -bound <= value <= bound:
                problems.append((field, f"{field} {value} outside [{-bound:g}, {bound:g}]"))

        role = data.get('role', Role.RELAY.value)
        if role not in [r.value for r in Role]:
            problems.append(('role', f"unknown role {role!r}"))

        if 'nc_capable' in data and not isinstance(data['nc_capable'], bool):
            problems.append(('nc_capable', 'nc_capable must be true or false'))

        return not problems, problems

    def validate_link_data(self, data: Dict) -> Tuple[bool, List[Tuple[str, str]]]:
        """
        Validate a link entry.

        Args:
            data: Link dict from the document

        Returns:
            Tuple of (is_valid, list of (field, message))
        """
        if not isinstance(data, dict):
            return False, [('', 'link entry must be an object')]

        problems = []
        for end in ('src', 'dst'):
            if not isinstance(data.get(end), str) or not data.get(end):
                problems.append((end, f"{end} must be a node id"))
        if not problems and data['src'] == data['dst']:
            problems.append(('dst', f"self-loop on {data['src']!r}"))

        delta = data.get('delta')
        if isinstance(delta, bool) or not isinstance(delta, (int, float)):
            problems.append(('delta', 'delta must be a number'))
        elif not 0.0 <= delta <= 1.0:
            problems.append(('delta', f"delta {delta} outside [0, 1]"))

        samples = data.get('samples', 0)
        if isinstance(samples, bool) or not isinstance(samples, int) or samples < 0:
            problems.append(('samples', f"samples must be a non-negative integer, got {samples!r}"))

        updated_at = data.get('updated_at')
        if updated_at is not None:
            try:
                self.normalize_timestamp(updated_at)
            except (TypeError, ValueError):
                problems.append(('updated_at', f"not an ISO-8601 timestamp: {updated_at!r}"))

        return not problems, problems

    def normalize_timestamp(self, value: Optional[str]) -> Optional[str]:
        """Canonical ISO-8601 form of a timestamp string, so exports are stable."""
        if value is None:
            return None
        if not isinstance(value, str):
            raise TypeError(f"Timestamp must be a string, got {type(value).__name__}")
        return isoparse(value).isoformat()

    def calculate_ewma(self, prior: float, observed: float, alpha: float) -> float:
        """
        Exponentially weighted update of an erasure estimate.

        Args:
            prior: Current estimate
            observed: Latest loss ratio
            alpha: Weight of the latest observation, in (0, 1]

        Returns:
            Updated estimate, clamped to [0, 1]
        """
        if not 0.0 < alpha <= 1.0:
            raise ValueError(f"Smoothing factor must be in (0, 1], got {alpha}")
        updated = (1.0 - alpha) * prior + alpha * observed
        return min(1.0, max(0.0, updated))

    # Diagnostics

    def _key_line(self, text: str, key: str) -> int:
        match = re.search(rf'"{key}"\s*:', text)
        return text.count('\n', 0, match.start()) + 1 if match else 1

    def _element_spans(self, text: str, key: str) -> List[Tuple[int, int]]:
        """Character spans of the elements of a top-level array, in order."""
        match = re.search(rf'"{key}"\s*:\s*\[', text)
        if not match:
            return []
        decoder = json.JSONDecoder()
        spans = []
        pos = _WHITESPACE.match(text, match.end()).end()
        while pos < len(text) and text[pos] != ']':
            _, end = decoder.raw_decode(text, pos)
            spans.append((pos, end))
            pos = _WHITESPACE.match(text, end).end()
            if pos < len(text) and text[pos] == ',':
                pos = _WHITESPACE.match(text, pos + 1).end()
        return spans

    def _locate(self, text: str, span: Optional[Tuple[int, int]], where: str,
                field: str, message: str) -> str:
        path = f"{where}.{field}" if field else where
        if span is None:
            return f"line ?: {path}: {message}"
        offset = span[0]
        if field:
            found = text.find(f'"{field}"', span[0], span[1])
            if found >= 0:
                offset = found
        return f"line {text.count(chr(10), 0, offset) + 1}: {path}: {message}"
