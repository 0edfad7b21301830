"""Run reports printed by the command line."""

import json
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from ..core.utils import digest, validate_enum
from ..models import Database, TreeQuery
from .classification import ComponentReport, ConditionReport, GraphClassification, TreeClassification
from .engine import CertainAnswer
from .oracle import OracleResult

FORMATS = ('text', 'json')


class RunReport(BaseModel):
    """Record of one command.

    Identical inputs give identical reports apart from ``elapsed_seconds``.
    """

    command: str
    inputs: Dict[str, str] = Field(default_factory=dict, description="Input name to sha256 digest")
    result: Dict[str, Any] = Field(default_factory=dict)
    method: Optional[str] = None
    elapsed_seconds: float = 0.0

    def add_input(self, name: str, text: str) -> 'RunReport':
        self.inputs[name] = digest(text)
        return self

    def render(self, fmt: str = 'text') -> str:
        validate_enum(fmt, 'format', FORMATS)
        if fmt == 'json':
            return json.dumps(self.model_dump(mode='json'), indent=2)
        lines = [f"command: {self.command}"]
        lines.extend(f"{key}: {_render_value(value)}" for key, value in self.result.items())
        if self.method is not None:
            lines.append(f"method: {self.method}")
        lines.extend(f"input.{name}: {value[:16]}" for name, value in self.inputs.items())
        lines.append(f"elapsed_seconds: {self.elapsed_seconds:.3f}")
        return "\n".join(lines)


def _render_value(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if value is None:
        return "-"
    if isinstance(value, (list, tuple)):
        return ", ".join(_render_value(v) for v in value) if value else "-"
    if isinstance(value, dict):
        return ", ".join(f"{k}={_render_value(v)}" for k, v in value.items()) if value else "-"
    return str(value)


def condition_fields(report: ConditionReport) -> Dict[str, Any]:
    return {
        'c1': report.c1,
        'c2': report.c2,
        'c_branch': report.c_branch,
        'c_factor': report.c_factor,
        'c_prefix': report.c_prefix,
        'witness_pairs': [w.render() for w in report.witnesses],
    }


def tree_classification_result(result: TreeClassification) -> Dict[str, Any]:
    return {'query': result.query, 'class': result.complexity.value, **condition_fields(result.conditions)}


def _component_line(component: ComponentReport) -> str:
    shape = f"tree {component.tree}" if component.tree else f"strong_cycle={str(component.strong_cycle).lower()}"
    return f"[{component.query}] {component.complexity.value} ({shape})"


def graph_classification_result(result: GraphClassification) -> Dict[str, Any]:
    fields: Dict[str, Any] = {
        'query': result.query,
        'class': result.complexity.value,
        'core': result.core,
        'upper_bound_open': result.upper_bound_open,
        'components': [_component_line(c) for c in result.components],
    }
    trees = [c for c in result.components if c.conditions is not None]
    if len(trees) == 1 and len(result.components) == 1:
        fields.update(condition_fields(trees[0].conditions))
    return fields


def certain_result(answer: CertainAnswer) -> Dict[str, Any]:
    return {
        'certain': answer.value,
        'witness': answer.witness,
        'class': answer.complexity.value,
        'repairs_checked': answer.repairs_checked,
    }


def oracle_result(result: OracleResult) -> Dict[str, Any]:
    falsifying: Optional[List[str]] = None
    if result.falsifying_repair is not None:
        falsifying = [f.render() for f in result.falsifying_repair.sorted_facts]
    return {
        'certain': result.value,
        'repairs': result.repair_count,
        'repairs_checked': result.repairs_checked,
        'falsifying_repair': falsifying,
    }


def instance_result(db: Database, path: Optional[str] = None) -> Dict[str, Any]:
    fields: Dict[str, Any] = dict(db.summary())
    if path is not None:
        fields['written_to'] = path
    return fields


def frugal_result(q: TreeQuery, repair: Database, sets: Optional[Dict] = None) -> Dict[str, Any]:
    fields: Dict[str, Any] = {'query': q.to_string(), 'frugal_repair': [f.render() for f in repair.sorted_facts]}
    if sets is not None:
        fields['frugal_sets'] = [
            f"{f.render()} -> {{{', '.join(sorted(names))}}}"
            for block in sets.values() for f, names in sorted(block.items(), key=lambda item: item[0].sort_key())
        ]
    return fields


__all__ = [
    'FORMATS',
    'RunReport',
    'condition_fields',
    'tree_classification_result',
    'graph_classification_result',
    'certain_result',
    'oracle_result',
    'instance_result',
    'frugal_result',
]
