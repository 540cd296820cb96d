"""Structured verdicts for the lemma checks."""

from __future__ import annotations

from dataclasses import dataclass, field

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


@dataclass
class LemmaReport:
    """Outcome of one named check on one instance.

    ``residuals`` maps named quantities (radians or length units) to their
    observed values; a ``fail`` verdict means at least one residual exceeded
    its tolerance, while ``inconclusive`` records an unmet precondition
    (non-transversality, degenerate direction, empty trigger set) rather
    than a violation.
    """

    lemma: str
    instance: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    tolerance: dict = field(default_factory=dict)
    verdict: str = PASS
    details: list = field(default_factory=list)

    @property
    def ok(self):
        return self.verdict != FAIL

    def to_json(self):
        return {
            "lemma": self.lemma,
            "instance": dict(self.instance),
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "tolerance": {k: float(v) for k, v in self.tolerance.items()},
            "verdict": self.verdict,
            "details": list(self.details),
        }
