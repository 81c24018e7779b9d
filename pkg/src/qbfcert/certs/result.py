from dataclasses import dataclass
from typing import Optional


@dataclass
class CheckResult:
    """Outcome of a certificate check.

    ``status`` is one of ``accept``, ``reject``, ``scope`` (ill-formed
    strategy) or ``too_large`` (enumeration bound exceeded).
    """

    status: str
    reason: str = ""
    node: Optional[int] = None
    counterexample: Optional[dict] = None

    @property
    def ok(self):
        return self.status == "accept"

    def __bool__(self):
        return self.ok

    def describe(self):
        if self.ok:
            return "correct"
        parts = ["incorrect" if self.status != "too_large" else "unchecked", self.reason]
        if self.node is not None:
            parts.append("at node %d" % self.node)
        if self.counterexample is not None:
            tau = " ".join("%d=%d" % (v, b) for v, b in sorted(self.counterexample.items()))
            parts.append("counterexample: %s" % (tau or "(empty)"))
        return ": ".join(p for p in parts if p)
