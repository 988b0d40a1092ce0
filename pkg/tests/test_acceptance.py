"""One pass/fail line per acceptance criterion, at the tolerances stored on each check."""

import json

import pytest

from conftest import ACCEPTANCE_LINES
from mcx.checks import ALL_CHECKS
from mcx.report import RunConfig, canonical_json

CFG = RunConfig(seed=7)


def _brief(evidence: dict, limit: int = 160) -> str:
    flat = {k: v for k, v in evidence.items() if not isinstance(v, (list, dict))}
    text = canonical_json(flat)
    return text if len(text) <= limit else text[: limit - 3] + "..."


@pytest.mark.parametrize("check", ALL_CHECKS, ids=lambda f: f.__name__.removeprefix("check_"))
def test_criterion(check):
    c = check(CFG)
    json.dumps(canonical_json(c.evidence))  # evidence must serialize
    line = f"[{'PASS' if c.status == 'pass' else 'FAIL'}] {c.name}: {_brief(c.evidence)} tol={canonical_json(c.tolerances)}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert c.status == "pass", line
