# File formats and reports exchanged with the CLI

import math
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveInt, model_validator


class ObjectKind(str, Enum):
    """Kinds of object files the validator understands"""
    STATE = "state"
    PREDICATE = "predicate"
    OBSERVABLE = "observable"
    CHANNEL = "channel"
    SUPEROP = "superop"


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"


class MatrixLiteral(BaseModel):
    """Row-major matrix literal: {"rows", "cols", "entries": [[re, im], ...]}"""
    rows: int = Field(ge=1)
    cols: int = Field(ge=1)
    entries: List[Tuple[float, float]]

    @model_validator(mode="after")
    def _check_entries(self) -> "MatrixLiteral":
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(f"expected {self.rows * self.cols} entries, got {len(self.entries)}")
        if not all(math.isfinite(re) and math.isfinite(im) for re, im in self.entries):
            raise ValueError("matrix literal has non-finite entries")
        return self

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "MatrixLiteral":
        rows, cols = matrix.shape
        flat = np.asarray(matrix, dtype=np.complex128).reshape(-1)
        return cls(rows=rows, cols=cols, entries=[(float(z.real), float(z.imag)) for z in flat])

    def to_array(self) -> np.ndarray:
        flat = np.array([complex(re, im) for re, im in self.entries], dtype=np.complex128)
        return flat.reshape(self.rows, self.cols)


class TupleFile(BaseModel):
    """State, predicate or observable tuple: {"sig": [...], "entries": [...]}"""
    sig: List[PositiveInt] = Field(min_length=1)
    entries: List[MatrixLiteral]


class ChannelFile(BaseModel):
    """Kraus channel: {"in": d, "out": d', "kraus": [...]}"""
    model_config = ConfigDict(populate_by_name=True)

    in_dim: int = Field(alias="in", ge=1)
    out_dim: int = Field(alias="out", ge=1)
    kraus: List[MatrixLiteral] = []


class SuperoperatorFile(BaseModel):
    """Block superoperator, blocks[j][i] maps input entry i to output entry j"""
    in_sig: List[PositiveInt] = Field(min_length=1)
    out_sig: List[PositiveInt] = Field(min_length=1)
    blocks: List[List[ChannelFile]]


class Violation(BaseModel):
    """One failed invariant with its numeric witness"""
    code: str
    message: str
    witness: Optional[float] = None


class Report(BaseModel):
    """Common shape of validation and duality reports"""
    model_config = ConfigDict(populate_by_name=True)

    passed: bool = Field(alias="pass")
    max_residual: float = 0.0
    trials: int = 0
    violations: List[Violation] = []

    def to_json_dict(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True)


class ValidationReport(Report):
    """Empty violation list means valid"""

    @classmethod
    def build(cls, violations: List[Violation], trials: int = 1,
              max_residual: float = 0.0) -> "ValidationReport":
        return cls(passed=not violations, max_residual=max_residual,
                   trials=trials, violations=violations)

    @property
    def valid(self) -> bool:
        return self.passed


class DualityReport(Report):
    """Largest gap between the two sides of the trace-pairing identity"""


class TripleReport(BaseModel):
    """Outcome of checking a quantitative Hoare triple"""
    program: str
    postcondition_digest: str
    precondition: TupleFile
    expectation: float
    threshold: float
    verdict: Verdict
    duality_residual: float
    duality_trials: int
    seed: int

    def to_json_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


class ErrorDetail(BaseModel):
    """Body of a failed command; syntax errors add the position and expected tokens"""
    type: str
    code: str
    message: str
    exit_code: int
    line: Optional[int] = None
    col: Optional[int] = None
    expected: Optional[List[str]] = None


class ErrorBody(BaseModel):
    error: ErrorDetail

    def to_json_dict(self) -> Dict[str, Any]:
        return self.model_dump(exclude_none=True)
