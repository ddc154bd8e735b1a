"""JSON shapes of the command-line reports.

Numbers travel as decimal strings so certified digits survive the trip.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class EnclosureModel(_Model):
    lo: str
    hi: str
    digits: int


class ReproEntryModel(_Model):
    id: str
    claim: str
    computed_lo: str
    computed_hi: str
    passed: bool = Field(alias="pass")


class ReproReportModel(_Model):
    tool: str
    version: str
    digits: int
    all_pass: bool
    entries: list[ReproEntryModel]


class CheckModel(_Model):
    id: str
    passed: bool = Field(alias="pass")
    lhs: str
    rhs: str


class ScenarioModel(_Model):
    T: str
    r0: str
    r0_prime: str
    gap: str
    d: str
    E_doubleprime_measure: str
    E_prime_measure: str
    E_prime_bound: EnclosureModel
    total_bound: EnclosureModel
    cover_steps: int
    checks: list[CheckModel]
    all_pass: bool


class QuantityModel(_Model):
    quantity: str
    parameters: dict[str, str]
    enclosure: EnclosureModel


class ExceptionalSetModel(_Model):
    T: str
    variant: str
    r0: str
    r_max: str
    intervals: list[tuple[str, str]]
    measure: str
    bound: EnclosureModel
    passed: bool = Field(alias="pass")
    warnings: list[str]


class CoverStepModel(_Model):
    r: str
    r_prime: str
    length: str
    certified_length_bound: str
    bracket_fallback: bool


class CoverModel(_Model):
    T: str
    variant: str
    r0: str
    r_max: str
    exhausted: bool
    steps: list[CoverStepModel]
    total_length: str
    chain_sum: str
    bound: EnclosureModel
    passed: bool = Field(alias="pass")


class BoundRowModel(_Model):
    variant: str
    lhs: str
    bound: str
    dominated: str
    in_exceptional_set: str = ""


class BoundsCompareModel(_Model):
    s: str
    r: str
    t: str
    T: str | None
    rows: list[BoundRowModel]
    order: list[str]
    expected_order: list[str] | None
    matches_expected: bool | None
    all_dominated: bool | None


def dump(model_cls: type[_Model], data: dict) -> str:
    """Validate ``data`` against ``model_cls`` and serialize with wire names."""
    return model_cls.model_validate(data).model_dump_json(by_alias=True, indent=2)
