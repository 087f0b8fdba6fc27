"""Uniform pass/fail reports for the structural checks."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckItem:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class CheckReport:
    title: str
    items: tuple[CheckItem, ...] = ()

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    def failures(self) -> list[CheckItem]:
        return [item for item in self.items if not item.passed]

    def lines(self) -> list[str]:
        out = []
        for item in self.items:
            mark = "ok" if item.passed else "FAIL"
            text = f"  [{mark}] {item.name}"
            if item.detail and not item.passed:
                text += f": {item.detail}"
            out.append(text)
        return out

    def summary(self) -> str:
        bad = self.failures()
        if not bad:
            return f"{self.title}: all {len(self.items)} checks passed"
        return f"{self.title}: {len(bad)} of {len(self.items)} checks failed"
