"""Financial antifragility from balance-sheet line items.

A company's antifragility is its liquidity balance (current assets minus
current liabilities) over its operating expenses. A sector's value is the
plain mean over its constituent companies.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, fields
from enum import Enum
from pathlib import Path
from typing import Sequence

from .errors import EmptySector, InputError, ParseError, ZeroExpenses

ASSET_FIELDS = ("inventories", "trade_receivables", "cash_equivalents", "other_current_assets")
LIABILITY_FIELDS = ("current_debt", "trade_payable", "other_current_liabilities")
EXPENSE_FIELDS = ("employment_cost", "financial_cost", "maintenance_operating_cost",
                  "other_financial_cost")
STATEMENT_HEADER = ("entity",) + ASSET_FIELDS + LIABILITY_FIELDS + EXPENSE_FIELDS


@dataclass(frozen=True)
class FinancialStatement:
    inventories: float
    trade_receivables: float
    cash_equivalents: float
    other_current_assets: float
    current_debt: float
    trade_payable: float
    other_current_liabilities: float
    employment_cost: float
    financial_cost: float
    maintenance_operating_cost: float
    other_financial_cost: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise InputError(f"{f.name} must be finite, got {v}")
        # asset/liability restatements can be negative; expenses cannot
        for name in EXPENSE_FIELDS:
            if getattr(self, name) < 0:
                raise InputError(f"{name} must be >= 0, got {getattr(self, name)}")

    @property
    def current_assets(self) -> float:
        return sum(getattr(self, n) for n in ASSET_FIELDS)

    @property
    def current_liabilities(self) -> float:
        return sum(getattr(self, n) for n in LIABILITY_FIELDS)

    @property
    def operating_expenses(self) -> float:
        return sum(getattr(self, n) for n in EXPENSE_FIELDS)

    def scaled(self, c: float) -> "FinancialStatement":
        return FinancialStatement(**{f.name: c * getattr(self, f.name) for f in fields(self)})


class Scope(str, Enum):
    COMPANY = "company"
    SECTOR = "sector"


@dataclass(frozen=True)
class Antifragility:
    value: float
    scope: Scope = Scope.COMPANY
    constituents: int | None = None

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise InputError(f"antifragility must be finite, got {self.value}")
        if self.scope is Scope.SECTOR and (self.constituents is None or self.constituents < 1):
            raise InputError("sector antifragility needs at least one constituent")

    def __float__(self):
        return float(self.value)


def company_phi(statement: FinancialStatement) -> Antifragility:
    expenses = statement.operating_expenses
    if expenses == 0:
        raise ZeroExpenses("operating expenses sum to zero; liquidity-to-expense ratio undefined")
    liquidity = statement.current_assets - statement.current_liabilities
    return Antifragility(liquidity / expenses, Scope.COMPANY)


def sector_phi(companies: Sequence[Antifragility]) -> Antifragility:
    """Equal-weighted mean of company values."""
    if not companies:
        raise EmptySector("sector has no constituent companies")
    for c in companies:
        if c.scope is not Scope.COMPANY:
            raise InputError("sector_phi takes company-scope values only")
    n = len(companies)
    return Antifragility(math.fsum(c.value for c in companies) / n, Scope.SECTOR, n)


def read_statements_csv(path: str | Path) -> list[tuple[str, FinancialStatement]]:
    """Parse an eleven-line-item statements file into ``(entity, statement)`` pairs."""
    return [(entity, st) for entity, st, _ in _read_rows(Path(path))]


def _read_rows(path: Path) -> list[tuple[str, FinancialStatement, int]]:
    out = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != STATEMENT_HEADER:
            raise ParseError(path, 1, "expected header " + ",".join(STATEMENT_HEADER))
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(STATEMENT_HEADER):
                raise ParseError(path, lineno, f"expected {len(STATEMENT_HEADER)} fields, got {len(row)}")
            try:
                values = [float(c) for c in row[1:]]
                out.append((row[0].strip(), FinancialStatement(*values), lineno))
            except ValueError as exc:
                raise ParseError(path, lineno, str(exc)) from None
    if not out:
        raise ParseError(path, 2, "no data rows")
    return out


def phi_table(path: str | Path) -> tuple[list[tuple[str, Antifragility]], Antifragility]:
    """Company values for every row of a statements file plus their sector mean.

    A zero-expense row is reported with its line number.
    """
    per_company = []
    for entity, st, lineno in _read_rows(Path(path)):
        try:
            per_company.append((entity, company_phi(st)))
        except ZeroExpenses as exc:
            raise ParseError(path, lineno, f"{entity}: ZeroExpenses: {exc}") from None
    return per_company, sector_phi([a for _, a in per_company])
